#pragma once

#include <string>
#include <vector>

#include "lorenzpsi/series.hpp"

namespace lorenzpsi {

/// The exact coefficient table of the singular-series expansion through
/// m = 3 (18 polynomials: P_{-1}..P_4, Q_{-2}..Q_3, R_{-2}..R_3), used as
/// the regression fixture for the generator.
struct Table1Entry {
    char component;  // 'P', 'Q' or 'R'
    int index;       // the series index of the component (P_{index} etc.)
    PsiPoly value;   // plus-family value
};

const std::vector<Table1Entry>& table1_fixture();

struct Table1Mismatch {
    char component;
    int index;
    std::string expected;
    std::string got;
};

struct Table1Report {
    bool ok = true;
    int cells_checked = 0;
    std::vector<Table1Mismatch> mismatches;
};

/// Compares a generated series against the fixture, exactly. For the minus
/// family the P and Q entries are sign-flipped before comparison. An
/// override fixture supports harness self-tests.
Table1Report verify_table1(const PsiSeries& series,
                           const std::vector<Table1Entry>* override_fixture = nullptr);

std::string poly_to_string(const PsiPoly& p);

}  // namespace lorenzpsi
