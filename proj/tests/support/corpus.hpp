#pragma once

#include <optional>
#include <string>
#include <vector>

namespace corpus {

struct TypeSet {
    std::string name;
    std::optional<std::string> types;
    std::vector<std::string> contextual;
};

struct Entry {
    std::string name;
    std::string program;
    std::vector<TypeSet> type_sets;
    std::vector<std::string> goals;
};

inline const char* const kList = "list --> [] ; [dynamic|list].\n";
inline const char* const kNat = "nat --> 0 ; s(nat).\n";
inline const char* const kMatrix = "[] -> matrix.\n[row|matrix] -> matrix.\n[] -> row.\n[dynamic|row] -> row.\n";

inline std::vector<Entry> entries() {
    return {
        {"append",
         "append([], Ys, Ys).\n"
         "append([X|Xs], Ys, [X|Zs]) :- append(Xs, Ys, Zs).\n",
         {{"list", kList, {}}, {"static", std::nullopt, {"static"}}, {"nonvar-var", std::nullopt, {"nonvar", "var"}},
          {"list-static", kList, {"static"}}},
         {"append(dynamic,dynamic,dynamic)", "append(list,list,dynamic)"}},
        {"transpose",
         "transpose(Xs, []) :- nullrows(Xs).\n"
         "transpose(Xs, [Y|Ys]) :- makerow(Xs, Y, Zs), transpose(Zs, Ys).\n"
         "makerow([], [], []).\n"
         "makerow([[X|Xs]|Ys], [X|Xs1], [Xs|Zs]) :- makerow(Ys, Xs1, Zs).\n"
         "nullrows([]).\n"
         "nullrows([[]|Ns]) :- nullrows(Ns).\n",
         {{"matrix", kMatrix, {}}, {"list", kList, {}}, {"static", std::nullopt, {"static"}}},
         {"transpose(dynamic,dynamic)", "transpose(matrix,dynamic)"}},
        {"nrev",
         "reverse([], []).\n"
         "reverse([X|Xs], Ys) :- reverse(Xs, Zs), append(Zs, [X], Ys).\n"
         "append([], Ys, Ys).\n"
         "append([X|Xs], Ys, [X|Zs]) :- append(Xs, Ys, Zs).\n",
         {{"list", kList, {}}, {"static", std::nullopt, {"static"}}, {"var", std::nullopt, {"var"}}},
         {"reverse(dynamic,dynamic)", "reverse(list,dynamic)"}},
        {"mutex",
         "reachable(S) :- initial(S).\n"
         "reachable(S2) :- reachable(S1), trans(S1, S2).\n"
         "unsafe(S) :- reachable(S), twocrit(S).\n"
         "initial(st(tok, idle)).\n"
         "trans(st(tok, X), st(crit, X)).\n"
         "trans(st(crit, X), st(tok, X)).\n"
         "trans(st(X, tok), st(X, crit)).\n"
         "trans(st(X, crit), st(X, tok)).\n"
         "trans(st(tok, idle), st(idle, tok)).\n"
         "trans(st(idle, tok), st(tok, idle)).\n",
         {{"ring", "tokp --> tok ; crit.\nidlep --> idle.\ngood --> st(tokp, idlep) ; st(idlep, tokp).\n", {}},
          {"static", std::nullopt, {"static"}},
          {"crit", "c --> crit.\n", {"nonvar"}}},
         {"unsafe(dynamic)", "reachable(dynamic)"}},
        {"evenodd",
         "even(0).\n"
         "even(s(X)) :- odd(X).\n"
         "odd(s(X)) :- even(X).\n",
         {{"nat", kNat, {}},
          {"parity", "ev --> 0 ; s(od).\nod --> s(ev).\n", {}},
          {"static-var", std::nullopt, {"static", "var"}}},
         {"even(dynamic)", "odd(nat)"}},
        {"member",
         "member(X, [X|_]).\n"
         "member(X, [_|T]) :- member(X, T).\n",
         {{"list", kList, {}}, {"static", std::nullopt, {"static"}}, {"nonvar", std::nullopt, {"nonvar"}}},
         {"member(dynamic,dynamic)", "member(dynamic,list)"}},
        {"length",
         "len([], 0).\n"
         "len([_|T], s(N)) :- len(T, N).\n",
         {{"list-nat", std::string(kList) + kNat, {}}, {"static", std::nullopt, {"static"}},
          {"nat-var", kNat, {"var"}}},
         {"len(dynamic,dynamic)", "len(list,dynamic)"}},
        {"treesize",
         "size(leaf, 0).\n"
         "size(node(L, _, R), s(N)) :- size(L, NL), size(R, NR), plus(NL, NR, N).\n"
         "plus(0, Y, Y).\n"
         "plus(s(X), Y, s(Z)) :- plus(X, Y, Z).\n",
         {{"tree-nat", "tree --> leaf ; node(tree, dynamic, tree).\nnat --> 0 ; s(nat).\n", {}},
          {"static", std::nullopt, {"static"}},
          {"nat", kNat, {"nonvar"}}},
         {"size(dynamic,dynamic)", "size(tree,dynamic)"}},
        {"unifiers",
         "dup(X, Y) :- Y = f(X, X).\n"
         "pairs([], []).\n"
         "pairs([X|Xs], [P|Ps]) :- P = p(X, X), pairs(Xs, Ps).\n"
         "same(X, X).\n",
         {{"list", kList, {}}, {"static", std::nullopt, {"static"}}, {"var", std::nullopt, {"var", "nonvar"}}},
         {"pairs(dynamic,dynamic)", "dup(dynamic,dynamic)"}},
        {"path",
         "edge(a, b).\n"
         "edge(b, c).\n"
         "edge(c, a).\n"
         "edge(d, a).\n"
         "path(X, Y) :- edge(X, Y).\n"
         "path(X, Y) :- edge(X, Z), path(Z, Y).\n",
         {{"cycle", "cyc --> a ; b ; c.\n", {}},
          {"src", "src --> d.\n", {"static"}},
          {"dyn", std::nullopt, {}}},
         {"path(dynamic,dynamic)", "path(src,dynamic)"}},
        {"ordered",
         "ordered([]).\n"
         "ordered([_]).\n"
         "ordered([X, Y|T]) :- le(X, Y), ordered([Y|T]).\n"
         "le(0, _).\n"
         "le(s(X), s(Y)) :- le(X, Y).\n",
         {{"list-nat", std::string(kList) + kNat, {}}, {"static", std::nullopt, {"static"}},
          {"natlist", "nl --> [] ; [nat|nl].\nnat --> 0 ; s(nat).\n", {"var"}}},
         {"ordered(dynamic)", "ordered(nl)"}},
        {"deadclause",
         "p(X) :- q(X), r(X).\n"
         "p(X) :- r(X).\n"
         "q(a).\n"
         "r(b).\n",
         {{"ab", "ta --> a.\ntb --> b.\n", {}}, {"static", std::nullopt, {"static"}},
          {"only-a", "ta --> a.\n", {}}},
         {"p(dynamic)", "p(ta)"}},
    };
}

} // namespace corpus
