#pragma once

#include "cexp/model.hpp"

#include <cstddef>

namespace cexp {

struct Thresholds {
  int degree = 0;
  int effective_degree = 1;
  double t_star = 0.0;    // 1 / (2 e d)
  double t_star_L = 0.0;  // 1 / (2 e^2 d (d + 1))
};

Thresholds thresholds(int degree);
Thresholds thresholds(const LocalHamiltonian& h);

// e d ||A|| (|t|/t*)^{M+1} / (1 - |t|/t*); OutsideRadius when |t| >= t*.
double obs_truncation_bound(double t, int order, int effective_degree, double a_norm);
// |S| (|t|/t*_L)^{M+1} / (1 - |t|/t*_L); OutsideRadius when |t| >= t*_L.
double loschmidt_truncation_bound(double abs_t, int order, std::size_t terms, int effective_degree);
// |S| tau^{M+1} / (1 - tau); OutsideRadius when tau >= 1.
double multi_truncation_bound(double tau, int order, std::size_t terms);

struct Certificate {
  double lower = 0.0;
  double upper = 0.0;
};
// e^{-eps} |e^{f}| <= |L| <= e^{eps} |e^{f}|
Certificate multiplicative_certificate(Complex log_estimate, double epsilon);

enum class ConcentrationVariant { Product, Evolved };

struct ConcentrationReport {
  ConcentrationVariant variant = ConcentrationVariant::Product;
  double delta = 0.0;
  double time = 0.0;
  double nu = 0.0;
  double raw_bound = 0.0;
  double bound = 0.0;  // min(raw_bound, 1)
  bool clamped = false;
  double t_star_L = 0.0;
  std::size_t terms = 0;
};

inline constexpr double kEvolvedEta = 1.0 / (90.0 * 343.0);

ConcentrationReport concentration_bound(ConcentrationVariant variant, double delta, std::size_t terms,
                                        int effective_degree, double time = 0.0);

struct QslReport {
  double t = 0.0;
  double lower_bound = 0.0;
  double energy_variance = 0.0;
  double mean_energy = 0.0;
  double t_qsl_floor = 0.0;
  double mt_ml_bound = 0.0;
  bool mt_ml_finite = true;
};

// <H> and Var(H) of a product state from pairwise term correlations.
double product_mean_energy(const LocalHamiltonian& h, const ProductState& rho);
double product_energy_variance(const LocalHamiltonian& h, const ProductState& rho);

QslReport qsl_report(const LocalHamiltonian& h, const ProductState& rho, double t);

}  // namespace cexp
