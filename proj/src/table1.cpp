#include "lorenzpsi/table1.hpp"

#include <sstream>

namespace lorenzpsi {

namespace {

// term constructors: re/im rational parts at a given (u, d) power
struct T {
    uint32_t u, d;
    long rn, rd;  // real part rn/rd
    long in, id;  // imaginary part in/id
};

PsiPoly make(std::initializer_list<T> ts) {
    PsiPoly p;
    for (const auto& t : ts)
        p.set(t.u, t.d, GaussianRational(Rational(t.rn, t.rd), Rational(t.in, t.id)));
    return p;
}

std::vector<Table1Entry> build_fixture() {
    std::vector<Table1Entry> v;
    auto add = [&](char c, int idx, PsiPoly p) { v.push_back({c, idx, std::move(p)}); };

    add('P', -1, make({{0, 0, 0, 1, 2, 1}}));
    add('Q', -2, make({{0, 0, 0, 1, -1, 5}}));
    add('R', -2, make({{0, 0, -1, 5, 0, 1}}));

    add('P', 0, make({{0, 0, 0, 1, 71, 9}}));
    add('Q', -1, make({{0, 0, 0, 1, 2, 1}}));
    add('R', -1, make({{0, 0, 17, 9, 0, 1}}));

    add('P', 1, make({{1, 0, 0, 1, -9880, 81}}));
    add('Q', 0, make({{0, 0, 0, 1, -349, 81}, {1, 0, 0, 1, -988, 81}}));
    add('R', 0, make({{0, 0, 1385, 54, 0, 1}, {1, 0, -988, 81, 0, 1}}));

    add('P', 2, make({{0, 0, 0, 1, -2108195, 972}, {1, 0, 0, 1, 469300, 243}}));
    add('Q', 1, make({{0, 0, 0, 1, -25991, 108}, {1, 0, 0, 1, 64220, 243}}));
    add('R', 1, make({{0, 0, -211189, 972, 0, 1}, {1, 0, 167960, 729, 0, 1}}));

    add('P', 3, make({{0, 1, 0, 1, 1, 1},
                      {1, 0, 0, 1, -96356411, 6561},
                      {2, 0, 0, 1, -2736760, 6561}}));
    add('Q', 2, make({{0, 1, 0, 1, 3, 10},
                      {0, 0, 0, 1, -477319147, 131220},
                      {1, 0, 0, 1, -167831753, 65610},
                      {2, 0, 0, 1, -273676, 2187}}));
    add('R', 2, make({{0, 1, -1, 5, 0, 1},
                      {0, 0, 138959125, 17496, 0, 1},
                      {1, 0, -58846039, 32805, 0, 1},
                      {2, 0, -1444456, 2187, 0, 1}}));

    add('P', 4, make({{0, 1, 0, 1, 25, 54},
                      {0, 0, 0, 1, -64653009635, 708588},
                      {1, 0, 0, 1, -107735075, 118098},
                      {2, 0, 0, 1, 206615500, 6561}}));
    add('Q', 3, make({{0, 1, 0, 1, 32, 27},
                      {0, 0, 0, 1, -25925844899, 708588},
                      {1, 0, 0, 1, -516846814, 59049},
                      {2, 0, 0, 1, 26636480, 2187}}));
    add('R', 3, make({{0, 1, -55, 27, 0, 1},
                      {0, 0, 64036692917, 3542940, 0, 1},
                      {1, 0, -2458513, 2187, 0, 1},
                      {2, 0, 813193160, 59049, 0, 1}}));
    return v;
}

}  // namespace

const std::vector<Table1Entry>& table1_fixture() {
    static const std::vector<Table1Entry> fixture = build_fixture();
    return fixture;
}

std::string poly_to_string(const PsiPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : p.terms()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        if (k.first) os << "*u^" << k.first;
        if (k.second) os << "*D^" << k.second;
    }
    return os.str();
}

Table1Report verify_table1(const PsiSeries& series,
                           const std::vector<Table1Entry>* override_fixture) {
    const auto& fixture = override_fixture ? *override_fixture : table1_fixture();
    Table1Report rep;
    bool minus = series.family() == Family::Minus;
    for (const auto& e : fixture) {
        // component index -> storage triple: P_k sits in X_{k-1}, Q_k and
        // R_k in X_k
        int m = e.component == 'P' ? e.index - 1 : e.index;
        if (m > series.max_m()) continue;
        const auto& t = series.triple(m);
        const PsiPoly* got = e.component == 'P' ? &t.P : (e.component == 'Q' ? &t.Q : &t.R);
        PsiPoly expect = e.value;
        if (minus && (e.component == 'P' || e.component == 'Q')) expect = -expect;
        ++rep.cells_checked;
        if (*got != expect) {
            rep.ok = false;
            rep.mismatches.push_back(
                {e.component, e.index, poly_to_string(expect), poly_to_string(*got)});
        }
    }
    return rep;
}

}  // namespace lorenzpsi
