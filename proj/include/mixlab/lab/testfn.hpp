#pragma once

#include "mixlab/duhamel.hpp"
#include "mixlab/lab/config.hpp"

#include <string>
#include <vector>

// Scaling experiment for the test-function argument: with
// psi_R(x,t) = phi^m(|x|/R) eta^m(t/T_R),  m = 2p/(p-1),
// it tabulates the Young remainders I1, J1 and the forcing pairing LHS
// against R and fits their log-log slopes.

namespace mixlab::lab {

/// C^2 quintic bridge 6z^5 - 15z^4 + 10z^3 on [0,1], clamped outside.
double smoothstep5(double z);
double smoothstep5_d1(double z);
double smoothstep5_d2(double z);

/// 1 on [0,1], 0 on [2, inf), C^2 bridge between.
double phi_cutoff(double r);
double phi_cutoff_d1(double r);
double phi_cutoff_d2(double r);
/// 0 on [0,1/4], 1 on [1/2,3/4], 0 on [4/5, inf), C^2 bridges between.
double eta_cutoff(double tau);
double eta_cutoff_d1(double tau);

struct TestFunctionSpec {
    enum class TimeScaling { RTo2s, IndependentT };
    TimeScaling time_scaling = TimeScaling::RTo2s;
    double T = 1.0;  ///< IndependentT: fixed time scale
    std::vector<double> R;
};

struct TestFnRow {
    double R = 0.0;
    double I1 = 0.0;
    double J1 = 0.0;
    double LHS = 0.0;
    double bound = 0.0;           ///< I1 + J1
    double generator_sup = 0.0;   ///< sup |L phi_R^m| on the grid
    double w_capture = 0.0;       ///< int w phi_R^m / int w
};

struct TestFnResult {
    double m = 0.0;
    std::vector<TestFnRow> rows;
    double slope_bound = 0.0;
    double slope_lhs = 0.0;
    double slope_generator = 0.0;
    double expected_bound = 0.0;   ///< N + (b - 2s(1+gamma))/(p-1)
    double expected_lhs = 0.0;     ///< 2s(rho+1)
    double expected_generator = 0.0;  ///< -2s
    double slope_gap = 0.0;        ///< slope_bound - slope_lhs
};

/// The spatial factor of J1 uses the pointwise majorant
///   |L phi^m| <= m phi^{m-1} (|Delta phi| + |(-Delta)^s phi|) + m(m-1) phi^{m-2} |grad phi|^2,
/// which keeps psi^{-1/(p-1)} |L psi|^{p/(p-1)} finite up to the support edge.
/// Requires 2R <= L/2 (DomainError otherwise) and a nonzero forcing for LHS.
TestFnResult testfn_experiment(const duhamel::ProblemSpec& spec, const TestFunctionSpec& tf);

TestFunctionSpec testfn_from(const Json& cfg);
Json to_json(const TestFnResult& r);
void write_testfn_csv(const TestFnResult& r, const std::string& path);

}  // namespace mixlab::lab
