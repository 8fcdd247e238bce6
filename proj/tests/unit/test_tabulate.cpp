#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "casmi/column.hpp"
#include "support/builders.hpp"

using namespace casmi;
using testsupport::code_isomorphic;
using testsupport::make_column;

namespace {

std::multiset<std::uint64_t> count_multiset(const FrequencyTable& t) {
    std::multiset<std::uint64_t> out;
    for (const auto& [code, count] : t.entries()) out.insert(count);
    return out;
}

std::uint64_t count_of(const FrequencyTable& t, std::uint32_t code) {
    for (const auto& [c, f] : t.entries()) {
        if (c == code) return f;
    }
    return 0;
}

std::uint64_t cell_of(const ContingencyTable& ct, std::uint32_t r, std::uint32_t c) {
    for (const auto& cell : ct.cells()) {
        if (cell.row == r && cell.col == c) return cell.count;
    }
    return 0;
}

}  // namespace

TEST_CASE("tabulate counts exact multiplicities") {
    // the a,a,a,b,c,c,d,e,e,f sample
    const auto col = make_column({0, 0, 0, 1, 2, 2, 3, 4, 4, 5}, 6);
    const auto t = tabulate(col);
    CHECK(t.n() == 10);
    CHECK(t.k_effective() == 6);
    CHECK(count_of(t, 0) == 3);
    CHECK(count_of(t, 1) == 1);
    CHECK(count_of(t, 2) == 2);
    CHECK(count_of(t, 3) == 1);
    CHECK(count_of(t, 4) == 2);
    CHECK(count_of(t, 5) == 1);
}

TEST_CASE("tabulate singleton sample") {
    const auto t = tabulate(make_column({0}, 1));
    CHECK(t.n() == 1);
    CHECK(t.k_effective() == 1);
    CHECK(count_of(t, 0) == 1);
}

TEST_CASE("tabulate constant column") {
    const std::vector<std::uint32_t> codes(4, 0);
    const auto t = tabulate(make_column(codes, 1));
    CHECK(t.n() == 4);
    CHECK(t.k_effective() == 1);
    CHECK(count_of(t, 0) == 4);
}

TEST_CASE("column invariants are enforced") {
    CHECK_THROWS_AS(make_column(std::vector<std::uint32_t>{}, 1), std::invalid_argument);
    // unused label
    CHECK_THROWS_AS(make_column({0, 0}, 2), std::invalid_argument);
    // code without a label
    CHECK_THROWS_AS(make_column({0, 3}, 2), std::invalid_argument);
}

TEST_CASE("cross_tabulate direct count") {
    const auto x = make_column({0, 0, 1}, 2, "x");
    const auto y = make_column({0, 1, 0}, 2, "y");
    const auto ct = cross_tabulate(x, y);
    CHECK(ct.n() == 3);
    CHECK(ct.cells().size() == 3);
    CHECK(cell_of(ct, 0, 0) == 1);
    CHECK(cell_of(ct, 0, 1) == 1);
    CHECK(cell_of(ct, 1, 0) == 1);
    CHECK(cell_of(ct, 1, 1) == 0);
}

TEST_CASE("cross_tabulate identical columns has empty off-diagonal") {
    const auto x = make_column({0, 1, 0, 1}, 2);
    const auto ct = cross_tabulate(x, x);
    CHECK(ct.cells().size() == 2);
    CHECK(cell_of(ct, 0, 0) == 2);
    CHECK(cell_of(ct, 1, 1) == 2);
}

TEST_CASE("cross_tabulate marginals of a constant row margin") {
    const auto x = make_column({0, 0}, 1);
    const auto y = make_column({0, 1}, 2);
    const auto ct = cross_tabulate(x, y);
    CHECK(ct.row_marginal().k_effective() == 1);
    CHECK(count_of(ct.row_marginal(), 0) == 2);
    CHECK(count_of(ct.col_marginal(), 0) == 1);
    CHECK(count_of(ct.col_marginal(), 1) == 1);
}

TEST_CASE("cross_tabulate rejects length mismatch") {
    const auto x = make_column({0, 1}, 2);
    const auto y = make_column({0, 1, 0}, 2);
    CHECK_THROWS_AS(cross_tabulate(x, y), std::invalid_argument);
}

TEST_CASE("cross_tabulate marginals sum cells and flatten matches cells") {
    std::mt19937_64 rng(7);
    const auto x = testsupport::random_uniform_column(60, 4, rng);
    const auto y = testsupport::random_uniform_column(60, 3, rng);
    const auto ct = cross_tabulate(x, y);
    std::uint64_t total = 0;
    std::map<std::uint32_t, std::uint64_t> rows, cols;
    std::multiset<std::uint64_t> cell_counts;
    for (const auto& cell : ct.cells()) {
        total += cell.count;
        rows[cell.row] += cell.count;
        cols[cell.col] += cell.count;
        cell_counts.insert(cell.count);
    }
    CHECK(total == ct.n());
    for (const auto& [code, sum] : rows) CHECK(sum == count_of(ct.row_marginal(), code));
    for (const auto& [code, sum] : cols) CHECK(sum == count_of(ct.col_marginal(), code));
    CHECK(count_multiset(ct.flatten()) == cell_counts);
}

TEST_CASE("join_columns assigns codes to distinct tuples") {
    const auto a = make_column({0, 0, 1}, 2, "a");
    const auto b = make_column({0, 1, 0}, 2, "b");
    const auto joined = join_columns({&a, &b});
    CHECK(joined.codes()[0] == 0);
    CHECK(joined.codes()[1] == 1);
    CHECK(joined.codes()[2] == 2);
    CHECK(joined.num_categories() == 3);
    CHECK(joined.name() == "a*b");
}

TEST_CASE("join_columns of a single column is code-isomorphic to it") {
    const auto c = make_column({1, 0, 1, 2}, 3);
    const auto joined = join_columns({&c});
    CHECK(code_isomorphic(c, joined));
}

TEST_CASE("join_columns merges duplicated patterns") {
    const auto a = make_column({0, 1, 0, 1}, 2, "a");
    const auto b = make_column({0, 1, 0, 1}, 2, "b");
    const auto joined = join_columns({&a, &b});
    CHECK(joined.num_categories() == 2);
    CHECK(count_multiset(tabulate(joined)) == std::multiset<std::uint64_t>{2, 2});
}

TEST_CASE("join_columns errors") {
    const auto a = make_column({0, 1}, 2);
    const auto b = make_column({0, 1, 0}, 2);
    CHECK_THROWS_AS(join_columns(std::vector<const CategoricalColumn*>{}), std::invalid_argument);
    CHECK_THROWS_AS(join_columns({&a, &b}), std::invalid_argument);
}

TEST_CASE("relabeling preserves the count multiset") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto col = testsupport::random_uniform_column(40, 5, rng);
        const auto shuffled = testsupport::relabel(col, rng);
        CHECK(count_multiset(tabulate(col)) == count_multiset(tabulate(shuffled)));
    }
}

TEST_CASE("join order changes labels but not the partition") {
    std::mt19937_64 rng(13);
    const auto a = testsupport::random_uniform_column(50, 3, rng, "a");
    const auto b = testsupport::random_uniform_column(50, 4, rng, "b");
    const auto ab = join_columns({&a, &b});
    const auto ba = join_columns({&b, &a});
    CHECK(code_isomorphic(ab, ba));
}

TEST_CASE("joint partition refines each member partition") {
    std::mt19937_64 rng(17);
    const auto a = testsupport::random_uniform_column(80, 4, rng, "a");
    const auto b = testsupport::random_uniform_column(80, 3, rng, "b");
    const auto joined = join_columns({&a, &b});
    CHECK(joined.num_categories() >= a.num_categories());
    CHECK(joined.num_categories() >= b.num_categories());
    std::vector<std::int64_t> to_a(joined.num_categories(), -1);
    std::vector<std::int64_t> to_b(joined.num_categories(), -1);
    for (std::size_t row = 0; row < joined.size(); ++row) {
        const auto j = joined.code(row);
        if (to_a[j] == -1) {
            to_a[j] = a.code(row);
            to_b[j] = b.code(row);
        }
        CHECK(to_a[j] == a.code(row));
        CHECK(to_b[j] == b.code(row));
    }
}
