#pragma once

// Subset-enumeration kernels behind the value operators.
//
// Every kernel has two implementations: `serial` is the straightforward
// reference kept for testing, `parallel` is the OpenMP version the library
// uses. Parallel kernels split work per player (or per coalition within one
// butterfly pass), so each output entry is summed in a fixed order and the
// result does not depend on the thread count.

#include <span>
#include <vector>

#include "mevr/types.hpp"

namespace mevr::kernels {

namespace serial {

// Σ_{S⊆N\{i}} |S|!(n−|S|−1)!/n! · [v(S∪{i}) − v(S)], accumulated coalition by coalition.
std::vector<double> shapley(int n, std::span<const double> v);

// 2^{1−n} Σ_{S⊆N\{i}} [v(S∪{i}) − v(S)].
std::vector<double> banzhaf(int n, std::span<const double> v);

// min_{S⊆N\{i}} [v(S∪{i}) − v(S)].
std::vector<double> min_marginal(int n, std::span<const double> v);

// c_R = Σ_{T⊆R} (−1)^{|R|−|T|} v(T), evaluated directly over submasks (O(3^n)).
std::vector<double> moebius(int n, std::span<const double> v);

// v(S) = Σ_{R⊆S} c_R, evaluated directly over submasks (O(3^n)).
std::vector<double> zeta(int n, std::span<const double> c);

}  // namespace serial

namespace parallel {

// Entries for players outside `players` are left at zero.
std::vector<double> shapley(int n, std::span<const double> v, Coalition players);
std::vector<double> shapley(int n, std::span<const double> v);

std::vector<double> banzhaf(int n, std::span<const double> v);

std::vector<double> min_marginal(int n, std::span<const double> v);

// In-place butterfly transforms, O(n·2^n).
std::vector<double> moebius(int n, std::span<const double> v);
std::vector<double> zeta(int n, std::span<const double> c);

}  // namespace parallel

// Worker threads OpenMP will use (1 when built without OpenMP).
int thread_count();

}  // namespace mevr::kernels
