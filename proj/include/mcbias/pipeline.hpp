#pragma once

// Two-stage Transform -> Combine scenario.
//
// Transform applies F(Y_j, .) to every data vector, once at the error mean
// nu (the nominal N_j) and once per systematic-error draw S_q (the replicate
// M_jq). Combine averages the nominals and synthesizes Q replicates
//
//   M_q = mean_j M_jq + J^{-1/2} U sqrt(D) Z_q,   Z_q ~ N(0, I),
//
// where U D U^T is the eigendecomposition of an input covariance. The
// current construction takes that covariance from the nominals N_j; the
// alternative takes it from the per-j replicate means mean_q M_jq.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mcbias/error_models.hpp"
#include "mcbias/linalg.hpp"
#include "mcbias/rng.hpp"

namespace mcbias {

/// J x K matrix of measurement vectors Y_j.
struct DataBatch {
  Mat rows;
};

/// Systematic-error draws S_q. When `shared` is true the Q rows are reused
/// for every data vector; otherwise the caller supplies J * Q rows and data
/// vector j consumes rows [j Q, (j + 1) Q).
struct ErrorBatch {
  Mat rows;
  bool shared = true;
};

struct TransformOutput {
  Mat nominals;  // J x K, N_j = F(Y_j, nu)
  std::size_t j = 0;
  std::size_t q = 0;
  std::size_t k = 0;
  std::vector<double> replicates;  // M_jq, laid out [j][q][k]

  std::span<const double> replicate(std::size_t jj, std::size_t qq) const noexcept {
    return {replicates.data() + (jj * q + qq) * k, k};
  }
};

enum class Construction { current, alternative };

std::string_view to_string(Construction c);
Construction construction_from_string(std::string_view name);

struct CombineOutput {
  Vec nominal;  // N^C
  Mat replicates;  // Q x K
  Construction construction = Construction::current;
  Mat input_cov;  // covariance whose eigendecomposition scaled the Z_q
};

/// Throws NumericalError if the kernel returns a non-finite value.
TransformOutput transform_stage(const DataBatch& data, const ErrorBatch& errors,
                                const TransformSpec& spec, std::span<const double> nu);

/// N^C = (1/J) sum_j N_j.
Vec combine_nominal(const TransformOutput& t);

/// Q x K matrix of mean_j M_jq.
Mat replicate_means_over_data(const TransformOutput& t);
/// J x K matrix of mean_q M_jq.
Mat replicate_means_over_errors(const TransformOutput& t);

/// Current construction. Needs J > 1. Draws Q*K standard normals from
/// `z_stream`, q-major.
CombineOutput combine_current(const TransformOutput& t, RngStream& z_stream);

/// Alternative construction. Needs J > 1 and Q >= 2.
CombineOutput combine_alternative(const TransformOutput& t, RngStream& z_stream);

/// Both constructions throw NumericalError when the input covariance overflows.
CombineOutput combine(const TransformOutput& t, Construction c, RngStream& z_stream);

}  // namespace mcbias
