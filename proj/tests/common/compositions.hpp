#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <relayq/transform_engine.hpp>

namespace relayq::testing {

// Randomized chains of transform-style maps, evaluated generically so the
// same chain runs on doubles (for finite differences) and on DualScalar.
class LstComposition {
 public:
  enum class Op { lst_exact, lst_jensen, decay, complement_rate, n0, power, mobius, log_rate };

  struct Step {
    Op op;
    double a;
    unsigned k;
  };

  LstComposition(const TransformEngine& exact, const TransformEngine& jensen, double pi0_exact, std::mt19937_64& rng)
      : exact_(&exact), jensen_(&jensen), pi0_(pi0_exact) {
    std::uniform_int_distribution<int> len(3, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = len(rng);
    bool rate = true;  // current value is a rate-like argument
    for (int i = 0; i < n; ++i) {
      const double u = unit(rng);
      if (rate) {
        if (u < 0.35) steps_.push_back({Op::lst_exact, 0.5 + unit(rng), 0});
        else if (u < 0.6) steps_.push_back({Op::lst_jensen, 0.5 + unit(rng), 0});
        else if (u < 0.85) steps_.push_back({Op::decay, (0.2 + unit(rng)) * 1e-3, 0});
        else {
          steps_.push_back({Op::log_rate, 50.0 + 100.0 * unit(rng), 0});
          continue;
        }
        rate = false;
      } else {
        if (u < 0.3) {
          steps_.push_back({Op::complement_rate, 100.0 + 400.0 * unit(rng), 0});
          rate = true;
        } else if (u < 0.6) {
          steps_.push_back({Op::n0, 0.0, 0});
        } else if (u < 0.8) {
          steps_.push_back({Op::power, 0.0, 1u + static_cast<unsigned>(3.0 * unit(rng))});
        } else {
          steps_.push_back({Op::mobius, 0.0, 0});
        }
      }
    }
  }

  // x is the transform variable in 1/ms; the chain itself works in 1/s.
  template <class S>
  S operator()(const S& x) const {
    using std::exp;
    using std::log1p;
    S v = 1e3 * x;
    for (const Step& s : steps_) {
      switch (s.op) {
        case Op::lst_exact: v = exact_->hop1().lst(s.a * v); break;
        case Op::lst_jensen: v = jensen_->hop1().lst(s.a * v); break;
        case Op::decay: v = exp(-s.a * v); break;
        case Op::complement_rate: v = s.a * (1.0 - v); break;
        case Op::n0: v = 1.0 - exact_->n0_complement(1.0 - v, pi0_, nullptr, n0_depth_); break;
        case Op::power: v = ipow(v, s.k); break;
        case Op::mobius: v = v / (2.0 - v); break;
        case Op::log_rate: v = s.a * log1p(v / s.a); break;
      }
    }
    return v;
  }

  std::string describe() const {
    static const char* names[] = {"L_exact", "L_jensen", "exp", "lam(1-.)", "N0", "pow", "x/(2-x)", "log1p"};
    std::string out;
    for (const Step& s : steps_) {
      if (!out.empty()) out += " -> ";
      out += names[static_cast<int>(s.op)];
    }
    return out;
  }

 private:
  const TransformEngine* exact_;
  const TransformEngine* jensen_;
  double pi0_;
  std::vector<Step> steps_;
  // Fixed recursion depth so perturbed evaluations run the identical
  // finite map; 64 levels is far past convergence at this load.
  int n0_depth_ = 64;
};

struct DerivativeCheck {
  std::string description;
  double theta = 0.0;
  double ad = 0.0;
  double fd = 0.0;
  double rel_error = 0.0;
};

// Compares DualScalar derivatives with central differences (h = 1e-6 per ms).
inline std::vector<DerivativeCheck> check_random_compositions(int count, std::uint64_t seed) {
  SystemParams p;
  p.arrival_rate = 200.0;
  p.threshold = 5;
  p.lst_mode = LstMode::exact;
  const TransformEngine exact(p);
  p.lst_mode = LstMode::jensen;
  const TransformEngine jensen(p);
  const double pi0 = exact.solve_pi0().pi0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_dist(0.05, 2.0);
  std::vector<DerivativeCheck> out;
  const double h = 1e-6;
  for (int i = 0; i < count; ++i) {
    LstComposition f(exact, jensen, pi0, rng);
    const double t = theta_dist(rng);
    const DualScalar ad = f(DualScalar::variable(t));
    const double fd = (f(t + h) - f(t - h)) / (2.0 * h);
    DerivativeCheck c;
    c.description = f.describe();
    c.theta = t;
    c.ad = ad.deriv();
    c.fd = fd;
    c.rel_error = std::abs(c.ad - fd) / std::max(std::abs(c.ad), 1e-300);
    out.push_back(c);
  }
  return out;
}

}  // namespace relayq::testing
