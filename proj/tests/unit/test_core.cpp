#include "helpers.hpp"

#include <set>

using namespace banditlab;
using namespace bltest;

TEST_CASE("validate accepts an orthonormal basis") {
    const auto a = basis(2);
    CHECK(a.size() == 2);
    CHECK(a.dim() == 2);
}

TEST_CASE("validate rejects bad arm sets") {
    CHECK(error_of([] { ActionSet::validate({vec({1, 0}), vec({2, 0})}); }) == ErrorCode::NormViolation);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(error_of([&] { ActionSet::validate({vec({1, 0, 0}), vec({s, s, 0})}); }) == ErrorCode::RankDeficient);
    CHECK(error_of([] { ActionSet::validate({vec({1, 0}), vec({0, 1}), vec({1, 0})}); }) == ErrorCode::DuplicateArm);
}

TEST_CASE("make_instance computes gaps and the optimum") {
    auto inst = BanditInstance::make(basis(2), vec({-0.5, 0.1}));
    CHECK(inst.optimal_index() == 0);
    CHECK(inst.gap(0) == 0.0);
    CHECK(inst.gap(1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(inst.delta_min() == doctest::Approx(0.6).epsilon(1e-15));

    CHECK(error_of([] { BanditInstance::make(basis(2), vec({0, 0})); }) == ErrorCode::NonUniqueOptimum);
    CHECK(error_of([] { BanditInstance::make(basis(2), vec({-1.5, 0})); }) == ErrorCode::MeanOutOfRange);

    const double s = 1.0 / std::sqrt(2.0);
    auto three = BanditInstance::make(ActionSet::validate({vec({1, 0}), vec({0, 1}), vec({s, s})}), vec({-0.5, 0.1}));
    CHECK(three.gap(2) == doctest::Approx(0.217157287525381).epsilon(1e-12));
}

TEST_CASE("gaps are invariant under shifts that move every mean equally") {
    // For the standard basis, v = c * 1 shifts every mean by c.
    auto a = BanditInstance::make(basis(3), vec({-0.3, 0.1, 0.2}));
    auto b = BanditInstance::make(basis(3), vec({-0.3 + 0.25, 0.1 + 0.25, 0.2 + 0.25}));
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.gap(i) == doctest::Approx(b.gap(i)).epsilon(1e-12));
    CHECK(a.optimal_index() == b.optimal_index());
}

TEST_CASE("pseudo regret is the prefix sum of gaps") {
    auto inst = BanditInstance::make(basis(2), vec({-0.5, 0.1}));
    std::vector<std::size_t> stars{0, 0, 0};
    CHECK(pseudo_regret(stars, inst) == std::vector<double>{0, 0, 0});
    std::vector<std::size_t> two{0, 1};
    const auto r = pseudo_regret(two, inst);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == doctest::Approx(0.6));

    auto q = BanditInstance::make(basis(2), vec({-0.25, 0.0}));
    std::vector<std::size_t> hundred(100, 1);
    CHECK(pseudo_regret(hundred, q).back() == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("pseudo regret is nondecreasing with increments in the gap set") {
    std::mt19937_64 rng(7);
    auto inst = random_instance(rng, 3, 6);
    std::uniform_int_distribution<std::size_t> pick(0, inst.size() - 1);
    std::vector<std::size_t> arms(500);
    for (auto& a : arms) a = pick(rng);
    const auto r = pseudo_regret(arms, inst);
    double prev = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        CHECK(r[t] >= prev);
        CHECK(r[t] - prev == doctest::Approx(inst.gap(arms[t])).epsilon(1e-9));
        prev = r[t];
    }
}

TEST_CASE("adversarial regret examples") {
    const auto a = basis(2);
    std::vector<Vector> same{vec({1, 0}), vec({1, 0})};
    std::vector<std::size_t> e1e1{0, 0}, e2e2{1, 1}, alt{0, 1};
    CHECK(adversarial_regret(e1e1, same, a) == doctest::Approx(2.0));
    CHECK(adversarial_regret(e2e2, same, a) == doctest::Approx(0.0));
    std::vector<Vector> alternating{vec({1, 0}), vec({0, 1})};
    CHECK(adversarial_regret(alt, alternating, a) == doctest::Approx(1.0));
    std::vector<std::size_t> one{0};
    CHECK(error_of([&] { adversarial_regret(one, same, a); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("adversarial regret ignores shifts that move every arm equally") {
    std::mt19937_64 rng(11);
    const auto a = basis(3);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    std::vector<Vector> losses, shifted;
    std::vector<std::size_t> arms;
    for (int t = 0; t < 50; ++t) {
        Vector l(3);
        for (int j = 0; j < 3; ++j) l(j) = u(rng);
        losses.push_back(l);
        shifted.push_back(l + Vector::Constant(3, 0.3));
        arms.push_back(static_cast<std::size_t>(t % 3));
    }
    CHECK(adversarial_regret(arms, losses, a) == doctest::Approx(adversarial_regret(arms, shifted, a)).epsilon(1e-12));

    AdversarialRegretTracker tracker(a);
    double last = 0.0;
    for (std::size_t t = 0; t < arms.size(); ++t) last = tracker.add(arms[t], losses[t]);
    CHECK(last == doctest::Approx(adversarial_regret(arms, losses, a)).epsilon(1e-12));
}

TEST_CASE("arm distributions") {
    CHECK(error_of([] { ArmDistribution(std::vector<double>{0.5, 0.6}); }) == ErrorCode::DomainError);
    CHECK(error_of([] { ArmDistribution(std::vector<double>{-0.1, 1.1}); }) == ErrorCode::DomainError);
    ArmDistribution p(std::vector<double>{0.25, 0.0, 0.75});
    CHECK(p.sample(0.0) == 0);
    CHECK(p.sample(0.2499) == 0);
    CHECK(p.sample(0.25) == 2);
    CHECK(p.sample(0.999999) == 2);
    const auto m = ArmDistribution::mix(ArmDistribution::uniform(2), ArmDistribution::point_mass(2, 1), 0.5);
    CHECK(m[0] == doctest::Approx(0.25));
    CHECK(m[1] == doctest::Approx(0.75));
}

TEST_CASE("rng streams are reproducible and addressable") {
    RngStream a(42, 1), b(42, 1), c(43, 1), d(42, 2);
    std::vector<std::uint64_t> va, vb;
    for (int i = 0; i < 100; ++i) {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
    }
    CHECK(va == vb);
    CHECK(c.next_u64() != va[0]);
    CHECK(d.next_u64() != va[0]);
    CHECK(RngStream::at(42, 1, 57) == va[57]);

    RngStream e(5, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = e.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));

    std::set<std::uint64_t> children;
    for (std::uint64_t k = 0; k < 16; ++k) children.insert(a.split(k).next_u64());
    CHECK(children.size() == 16);
}
