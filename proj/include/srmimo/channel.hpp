#pragma once

#include <armadillo>

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace srmimo
{

// Spatial correlation shared by all users. Exponential entries are a^(j-i)
// above the diagonal and the conjugate below, so the diagonal is 1 and
// tr R = M.
struct CorrelationSpec
{
    enum class Kind
    {
        Identity,
        Exponential,
        Explicit,
    };

    Kind kind = Kind::Identity;
    arma::uword M = 0;
    std::complex<double> a{0.0, 0.0}; // Exponential only
    arma::cx_mat matrix;              // Explicit only

    static CorrelationSpec identity(arma::uword M);
    static CorrelationSpec exponential(arma::uword M, std::complex<double> a);
    static CorrelationSpec explicit_matrix(arma::cx_mat R);

    // Same correlation law at a different antenna count. Explicit matrices
    // cannot be resized.
    CorrelationSpec resized(arma::uword new_M) const;

    // Canonical text form, accepted back by parse_correlation().
    std::string describe() const;
};

// Parses "identity", "exp:<re>,<im>" (or "exp:<re>") and "file:<path>".
CorrelationSpec parse_correlation(std::string_view text, arma::uword M);

// Plain-text matrix file: first token M, then M rows of M "re im" pairs.
arma::cx_mat read_correlation_file(const std::string &path);
void write_correlation_file(const std::string &path, const arma::cx_mat &R);

arma::cx_mat build_correlation(const CorrelationSpec &spec);

// Returns S with S S^H = R: the lower Cholesky factor when R is positive
// definite, otherwise the Hermitian eigen square root V diag(sqrt(max(l,0))) V^H.
arma::cx_mat matrix_sqrt(const arma::cx_mat &R);

// Identifies one random draw. Each tag owns an independent generator, so
// trials can run in any order on any thread.
struct SeedTag
{
    std::uint64_t master = 0;
    std::uint64_t stream = 0;  // sweep point
    std::uint64_t trial = 0;
    std::uint64_t attempt = 0; // bumped when an ill-conditioned draw is rejected

    bool operator==(const SeedTag &) const = default;
};

std::mt19937_64 make_substream(const SeedTag &tag);

// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
arma::cx_mat complex_gaussian(arma::uword rows, arma::uword cols, std::mt19937_64 &rng);

struct ChannelRealization
{
    arma::cx_mat H; // M x K, column k is h_k = R^{1/2} z_k
    arma::cx_vec u; // K data symbols
    SeedTag tag;

    arma::uword antennas() const { return H.n_rows; }
    arma::uword users() const { return H.n_cols; }
    double load() const { return double(H.n_cols) / double(H.n_rows); }
};

// Draws z_k and u from the tag's substream (Z first, then u). An empty
// R_sqrt means identity correlation with M = `antennas`.
ChannelRealization sample_realization(const arma::cx_mat &R_sqrt, arma::uword K, const SeedTag &tag);
ChannelRealization sample_realization(arma::uword antennas, const arma::cx_mat &R_sqrt, arma::uword K,
                                      const SeedTag &tag);

// Correlation matrix with its square-root factor and spectrum, built once per
// scenario and read-only afterwards.
class CorrelatedChannel
{
public:
    explicit CorrelatedChannel(const CorrelationSpec &spec);

    arma::uword antennas() const { return R_.n_rows; }
    bool is_identity() const { return identity_; }
    const arma::cx_mat &correlation() const { return R_; }
    const arma::cx_mat &sqrt_factor() const { return sqrt_; }
    const arma::vec &eigenvalues() const { return eigs_; }

    ChannelRealization sample(arma::uword K, const SeedTag &tag) const;

private:
    arma::cx_mat R_;
    arma::cx_mat sqrt_; // empty for identity
    arma::vec eigs_;
    bool identity_ = false;
};

} // namespace srmimo
