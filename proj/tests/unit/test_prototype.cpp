#include <doctest.h>

#include <random>

#include "cdem/errors.hpp"
#include "cdem/prototype.hpp"
#include "oracles.hpp"

using namespace cdem;
using Eigen::MatrixXd;

namespace {

MatrixXd rows(std::initializer_list<std::initializer_list<double>> values) {
    MatrixXd m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : values) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("class and complement centers") {
    const auto p = fit_prototypes(rows({{0, 0}, {2, 0}, {0, 2}}), std::vector<int>{0, 0, 1}, 2);
    CHECK(p.centers.row(0) == Eigen::RowVector2d(1, 0));
    CHECK(p.complement_centers.row(0) == Eigen::RowVector2d(0, 2));
    CHECK(p.counts == std::vector<std::size_t>{2, 1});
}

TEST_CASE("one sample per class") {
    const MatrixXd x = rows({{1, 2}, {3, 4}, {5, 6}});
    const auto p = fit_prototypes(x, std::vector<int>{0, 1, 2}, 3);
    CHECK(p.centers == x);
}

TEST_CASE("empty class is a data error") {
    CHECK_THROWS_AS(fit_prototypes(rows({{0, 0}, {1, 1}}), std::vector<int>{0, 0}, 2), DataError);
}

TEST_CASE("property: centers match an independent mean loop") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = oracle::random_instance(rng);
        const MatrixXd z = inst.x.topRows(static_cast<Eigen::Index>(inst.n_source)) * inst.projection;
        const auto p = fit_prototypes(z, inst.source_labels, inst.num_classes);
        for (int c = 0; c < inst.num_classes; ++c) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(z.cols());
            Eigen::RowVectorXd rest = Eigen::RowVectorXd::Zero(z.cols());
            int n = 0;
            for (std::size_t i = 0; i < inst.n_source; ++i) {
                if (inst.source_labels[i] == c) {
                    sum += z.row(static_cast<Eigen::Index>(i));
                    ++n;
                } else {
                    rest += z.row(static_cast<Eigen::Index>(i));
                }
            }
            const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
            CHECK((p.centers.row(c) - sum / n).cwiseAbs().maxCoeff() <= 1e-12 * scale);
            CHECK((p.complement_centers.row(c) - rest / (static_cast<double>(inst.n_source) - n))
                      .cwiseAbs()
                      .maxCoeff() <= 1e-12 * scale);
        }
    }
}

TEST_CASE("source probabilities") {
    const auto protos = fit_prototypes(rows({{0, 0}, {10, 0}}), std::vector<int>{0, 1}, 2);
    const MatrixXd p = source_probabilities(protos, rows({{0, 0}, {5, 0}}));
    CHECK(p(0, 0) > 0.5);
    CHECK(row_argmax(p)[0] == 0);
    CHECK(p(1, 0) == doctest::Approx(0.5).epsilon(1e-15));

    const auto tri = fit_prototypes(rows({{1, 0}, {-0.5, std::sqrt(3.0) / 2}, {-0.5, -std::sqrt(3.0) / 2}}),
                                    std::vector<int>{0, 1, 2}, 3);
    const MatrixXd u = source_probabilities(tri, rows({{0, 0}}));
    for (int c = 0; c < 3; ++c) CHECK(std::abs(u(0, c) - 1.0 / 3) <= 1e-12);
}

TEST_CASE("property: softmax matches a long double evaluation and is shift invariant") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXd centers = 3.0 * oracle::random_matrix(rng, 5, 4);
        const MatrixXd pts = 3.0 * oracle::random_matrix(rng, 12, 4);
        const MatrixXd d = center_distances(pts, centers);
        const MatrixXd p = softmax_neg_distance(d);
        const auto ref = oracle::softmax_direct(pts, centers);
        const MatrixXd shifted = softmax_neg_distance((d.array() + 7.25).matrix());
        const auto nearest = nearest_prototype(centers, pts);
        const auto arg = row_argmax(p);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-9);
            for (Eigen::Index c = 0; c < 5; ++c) {
                CHECK(std::abs(p(i, c) - ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) <= 1e-12);
                CHECK(std::abs(p(i, c) - shifted(i, c)) <= 1e-12);
                CHECK(p(i, c) >= 0.0);
            }
            CHECK(arg[static_cast<std::size_t>(i)] == nearest[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("argmax ties go to the lower class") {
    CHECK(row_argmax(rows({{0.5, 0.5}, {0.2, 0.4}}))[0] == 0);
    CHECK(nearest_prototype(rows({{-1, 0}, {1, 0}}), rows({{0, 3}}))[0] == 0);
}

TEST_CASE("k-means on already clustered data") {
    const MatrixXd init = rows({{0, 0}, {10, 10}});
    const MatrixXd pts = rows({{0, 0}, {0, 0}, {10, 10}, {10, 10}});
    const auto km = target_kmeans(pts, init);
    CHECK(km.iterations == 1);
    CHECK(km.converged);
    CHECK(km.clusters.centers == init);
}

TEST_CASE("single cluster gives the global mean") {
    std::mt19937_64 rng(2);
    const MatrixXd pts = oracle::random_matrix(rng, 9, 3);
    const auto km = target_kmeans(pts, MatrixXd::Zero(1, 3));
    CHECK((km.clusters.centers.row(0) - pts.colwise().mean()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("more clusters than targets is a data error") {
    CHECK_THROWS_AS(target_kmeans(MatrixXd::Zero(2, 2), MatrixXd::Zero(3, 2)), DataError);
}

TEST_CASE("empty cluster keeps its previous center") {
    const MatrixXd init = rows({{0, 0}, {100, 100}});
    const MatrixXd pts = rows({{0, 0}, {1, 0}, {0, 1}});
    const auto km = target_kmeans(pts, init);
    CHECK(km.clusters.centers.row(1) == init.row(1));
    CHECK(km.clusters.counts[1] == 0);
}

TEST_CASE("property: k-means SSE is non-increasing and matches an independent Lloyd") {
    std::mt19937_64 rng(1234);
    KMeansOptions exact;
    exact.tol = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = std::uniform_int_distribution<int>(10, 80)(rng);
        const int d = std::uniform_int_distribution<int>(2, 6)(rng);
        MatrixXd pts = oracle::random_matrix(rng, n, d);
        const MatrixXd offset = 2.5 * oracle::random_matrix(rng, 1, d);
        for (int i = 0; i < n; i += 2) pts.row(i) += offset.row(0);
        const MatrixXd init = oracle::random_matrix(rng, 2, d);
        const auto km = target_kmeans(pts, init, exact);
        for (std::size_t i = 1; i < km.sse_trace.size(); ++i) CHECK(km.sse_trace[i] <= km.sse_trace[i - 1] + 1e-12);
        const auto ref = oracle::lloyd(pts, init);
        CHECK(km.assignment == ref.assignment);
        CHECK((km.clusters.centers - ref.centers).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("combined pseudo labels") {
    MatrixXd ps(1, 2);
    ps << 0.9, 0.1;
    MatrixXd pt(1, 2);
    pt << 0.2, 0.8;
    const auto table = combined_pseudo_labels(ps, pt, 3, 11);
    CHECK(std::abs(table.p(0, 0) - 7.8 / 11) <= 1e-12);
    CHECK(std::abs(table.p(0, 1) - 3.2 / 11) <= 1e-12);
    CHECK(std::abs(table.p(0, 0) - 0.70909090909090909) <= 1e-12);
    CHECK(table.y[0] == 0);
    CHECK(table.y_source[0] == 0);
    CHECK(table.y_target[0] == 1);
    CHECK_FALSE(table.consistent[0]);
    CHECK(table.confidence(0) == table.p(0, 0));

    const auto last = combined_pseudo_labels(ps, pt, 11, 11);
    CHECK(last.p == pt);
    const auto same = combined_pseudo_labels(ps, ps, 4, 11);
    CHECK((same.p - ps).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(same.consistent[0]);

    CHECK_THROWS_AS(combined_pseudo_labels(ps, pt, 0, 11), ConfigError);
    CHECK_THROWS_AS(combined_pseudo_labels(ps, pt, 12, 11), ConfigError);
}

TEST_CASE("property: combined p is a convex combination") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const int c = std::uniform_int_distribution<int>(2, 6)(rng);
        const MatrixXd ps = softmax_neg_distance(oracle::random_matrix(rng, 15, c).cwiseAbs());
        const MatrixXd pt = softmax_neg_distance(oracle::random_matrix(rng, 15, c).cwiseAbs());
        const int t = std::uniform_int_distribution<int>(1, 11)(rng);
        const auto table = combined_pseudo_labels(ps, pt, t, 11);
        for (Eigen::Index i = 0; i < 15; ++i) {
            CHECK(std::abs(table.p.row(i).sum() - 1.0) <= 1e-9);
            for (Eigen::Index j = 0; j < c; ++j) {
                CHECK(table.p(i, j) >= std::min(ps(i, j), pt(i, j)) - 1e-15);
                CHECK(table.p(i, j) <= std::max(ps(i, j), pt(i, j)) + 1e-15);
            }
            CHECK(table.consistent[static_cast<std::size_t>(i)] ==
                  (table.y_source[static_cast<std::size_t>(i)] == table.y_target[static_cast<std::size_t>(i)]));
        }
    }
}
