#pragma once

// Hand-coded payoff families for the worked examples: matching pennies with
// a bonus for the larger action weight, and the two one-voter games.

#include <algorithm>

#include "myopic/payoff.hpp"

namespace fixture {

using myopic::Layout;
using myopic::MixedProfile;
using myopic::PayoffFamily;
using myopic::Vector;

// A = [[1,-1],[-1,1]]; player one gets (p,1-p) A (q,1-q)^t + max(p,1-p),
// player two gets -(p,1-p) A (q,1-q)^t + max(q,1-q).
inline PayoffFamily matching_pennies_bonus() {
  return PayoffFamily(
      Layout({2, 2}),
      [](const MixedProfile& x) {
        const double p = x(0, 0), q = x(1, 0);
        const double a[2][2] = {{1, -1}, {-1, 1}};
        const double bp = std::max(p, 1 - p), bq = std::max(q, 1 - q);
        Vector w(4);
        for (int i = 0; i < 2; ++i) {
          w[i] = a[i][0] * q + a[i][1] * (1 - q) + bp;
          w[2 + i] = -(p * a[0][i] + (1 - p) * a[1][i]) + bq;
        }
        return w;
      },
      3.0);
}

// Actions (Trump, Clinton); p = probability of Trump.
inline PayoffFamily voting_one() {
  return PayoffFamily(
      Layout({2}),
      [](const MixedProfile& x) {
        const double p = x(0, 0);
        return Vector{1 - 5 * p, -5 * p};
      },
      5.0);
}

inline PayoffFamily voting_two() {
  return PayoffFamily(
      Layout({2}),
      [](const MixedProfile& x) {
        const double p = x(0, 0);
        return Vector{1 - 5 * p, 0.0};
      },
      4.0);
}

}  // namespace fixture
