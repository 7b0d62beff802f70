#pragma once

#include "core.hpp"
#include "errors.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <random>
#include <vector>

namespace bltest {

using banditlab::ActionSet;
using banditlab::BanditInstance;
using banditlab::Vector;

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline ActionSet basis(int d) {
    std::vector<Vector> xs;
    for (int i = 0; i < d; ++i) xs.push_back(Vector::Unit(d, i));
    return ActionSet::validate(xs);
}

inline BanditInstance orthonormal(std::initializer_list<double> gaps, double base = -0.5) {
    const int d = static_cast<int>(gaps.size());
    Vector theta(d);
    int i = 0;
    for (double g : gaps) theta(i++) = base + g;
    return BanditInstance::make(basis(d), theta);
}

/// Random spanning arm set of n unit-ball vectors in R^d, arms 0..d-1 close to a basis.
inline ActionSet random_actions(std::mt19937_64& rng, int d, int n) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> r(0.3, 1.0);
    for (;;) {
        std::vector<Vector> xs;
        for (int k = 0; k < n; ++k) {
            Vector v(d);
            for (int j = 0; j < d; ++j) v(j) = g(rng);
            xs.push_back(v / v.norm() * r(rng));
        }
        try {
            return ActionSet::validate(xs);
        } catch (const banditlab::BanditError&) {
        }
    }
}

/// Random instance whose means stay inside [-1, 1] with a unique optimum.
inline BanditInstance random_instance(std::mt19937_64& rng, int d, int n) {
    std::normal_distribution<double> g;
    for (;;) {
        ActionSet a = random_actions(rng, d, n);
        Vector theta(d);
        for (int j = 0; j < d; ++j) theta(j) = g(rng);
        theta *= 0.8 / theta.norm();
        try {
            auto inst = BanditInstance::make(a, theta);
            if (inst.delta_min() > 0.02) return inst;
        } catch (const banditlab::BanditError&) {
        }
    }
}

template <class F>
banditlab::ErrorCode error_of(F&& f) {
    try {
        f();
    } catch (const banditlab::BanditError& e) {
        return e.code();
    }
    FAIL("expected a BanditError");
    return banditlab::ErrorCode::DomainError;
}

}  // namespace bltest
