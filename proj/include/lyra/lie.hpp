// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lyra/poly.hpp"
#include "lyra/template.hpp"

namespace lyra {

inline constexpr std::size_t kDefaultTermCap = 20000;

class TermCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// grad(V) . f, exact. Works for concrete and parametric V.
template <class C>
BasicPoly<C> lie_derivative(const BasicPoly<C>& v, const VectorField& f) {
  if (v.dimension() != f.dimension()) throw DimensionError("V and f have different dimensions");
  BasicPoly<C> out(v.dimension());
  for (std::size_t i = 0; i < f.dimension(); ++i) {
    if (f[i].is_zero()) continue;
    BasicPoly<C> d = v.derivative(i);
    if (d.is_zero()) continue;
    out += multiply(d, f[i]);
  }
  return out;
}

/// Memoized sequence L_f^1 V, L_f^2 V, ... Later orders are computed on demand
/// and any order whose term count exceeds the cap raises TermCapExceeded.
template <class C>
class LieChain {
 public:
  LieChain(BasicPoly<C> base, VectorField field, std::size_t term_cap = kDefaultTermCap)
      : base_(std::move(base)), field_(std::move(field)), cap_(term_cap) {
    if (base_.dimension() != field_.dimension()) throw DimensionError("V and f have different dimensions");
  }

  const BasicPoly<C>& base() const { return base_; }
  const VectorField& field() const { return field_; }

  /// L_f^k V for k >= 1 (k = 0 returns V itself).
  const BasicPoly<C>& order(std::size_t k) {
    if (k == 0) return base_;
    while (derivatives_.size() < k) {
      const BasicPoly<C>& prev = derivatives_.empty() ? base_ : derivatives_.back();
      BasicPoly<C> next = lie_derivative(prev, field_);
      if (next.size() > cap_)
        throw TermCapExceeded("Lie derivative of order " + std::to_string(derivatives_.size() + 1) + " has " +
                              std::to_string(next.size()) + " terms (cap " + std::to_string(cap_) + ")");
      derivatives_.push_back(std::move(next));
    }
    return derivatives_[k - 1];
  }

  /// Orders computed so far.
  const std::vector<BasicPoly<C>>& derivatives() const { return derivatives_; }

 private:
  BasicPoly<C> base_;
  VectorField field_;
  std::size_t cap_;
  std::vector<BasicPoly<C>> derivatives_;
};

template <class C>
LieChain<C> lie_chain(const BasicPoly<C>& v, const VectorField& f, std::size_t r,
                      std::size_t term_cap = kDefaultTermCap) {
  if (r < 1) throw std::invalid_argument("Lie chain order must be at least 1");
  LieChain<C> chain(v, f, term_cap);
  chain.order(r);
  return chain;
}

}  // namespace lyra
