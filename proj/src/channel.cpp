#include "srmimo/channel.hpp"
#include "srmimo/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace srmimo
{

namespace
{

constexpr double hermitian_tol = 1e-10;
constexpr double psd_tol = 1e-10;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double parse_double(std::string_view text, std::string_view what)
{
    // std::from_chars for double is available in libstdc++ 11
    double value = 0.0;
    auto first = text.data();
    auto last = text.data() + text.size();
    while (first != last && *first == ' ')
        ++first;
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw Error(Errc::InvalidArgument, "parse_correlation",
                    "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    return value;
}

double hermitian_defect(const arma::cx_mat &R)
{
    return R.is_empty() ? 0.0 : arma::abs(R - R.t()).max();
}

} // namespace

CorrelationSpec CorrelationSpec::identity(arma::uword M)
{
    CorrelationSpec spec;
    spec.kind = Kind::Identity;
    spec.M = M;
    return spec;
}

CorrelationSpec CorrelationSpec::exponential(arma::uword M, std::complex<double> a)
{
    CorrelationSpec spec;
    spec.kind = Kind::Exponential;
    spec.M = M;
    spec.a = a;
    return spec;
}

CorrelationSpec CorrelationSpec::explicit_matrix(arma::cx_mat R)
{
    CorrelationSpec spec;
    spec.kind = Kind::Explicit;
    spec.M = R.n_rows;
    spec.matrix = std::move(R);
    return spec;
}

CorrelationSpec CorrelationSpec::resized(arma::uword new_M) const
{
    if (kind == Kind::Explicit && new_M != M)
        throw Error(Errc::BadDimensions, "CorrelationSpec::resized",
                    "an explicit correlation matrix has fixed size " + std::to_string(M));
    CorrelationSpec out = *this;
    out.M = new_M;
    return out;
}

std::string CorrelationSpec::describe() const
{
    std::ostringstream os;
    os << std::setprecision(9);
    switch (kind)
    {
    case Kind::Identity:
        os << "identity";
        break;
    case Kind::Exponential:
        os << "exp:" << a.real() << "," << a.imag();
        break;
    case Kind::Explicit:
        os << "explicit(" << M << "x" << M << ")";
        break;
    }
    return os.str();
}

CorrelationSpec parse_correlation(std::string_view text, arma::uword M)
{
    if (text == "identity" || text == "I")
        return CorrelationSpec::identity(M);

    if (text.starts_with("exp:"))
    {
        auto body = text.substr(4);
        auto comma = body.find(',');
        double re = parse_double(body.substr(0, comma), "real part");
        double im = comma == std::string_view::npos ? 0.0 : parse_double(body.substr(comma + 1), "imaginary part");
        return CorrelationSpec::exponential(M, {re, im});
    }

    if (text.starts_with("file:"))
    {
        auto R = read_correlation_file(std::string(text.substr(5)));
        if (R.n_rows != M)
            throw Error(Errc::BadDimensions, "parse_correlation",
                        "correlation file holds a " + std::to_string(R.n_rows) + "x" + std::to_string(R.n_rows) +
                            " matrix but M = " + std::to_string(M));
        return CorrelationSpec::explicit_matrix(std::move(R));
    }

    throw Error(Errc::InvalidArgument, "parse_correlation",
                "unknown correlation '" + std::string(text) + "' (expected identity, exp:<re>,<im> or file:<path>)");
}

arma::cx_mat read_correlation_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::InvalidArgument, "read_correlation_file", "cannot open '" + path + "'");

    long long M = 0;
    if (!(in >> M) || M <= 0)
        throw Error(Errc::InvalidArgument, "read_correlation_file", "missing or invalid size in '" + path + "'");

    arma::cx_mat R(M, M);
    for (long long i = 0; i < M; ++i)
        for (long long j = 0; j < M; ++j)
        {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im))
                throw Error(Errc::InvalidArgument, "read_correlation_file",
                            "truncated matrix in '" + path + "' at row " + std::to_string(i));
            R(i, j) = {re, im};
        }
    return R;
}

void write_correlation_file(const std::string &path, const arma::cx_mat &R)
{
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::InvalidArgument, "write_correlation_file", "cannot open '" + path + "'");
    out << std::setprecision(17) << R.n_rows << '\n';
    for (arma::uword i = 0; i < R.n_rows; ++i)
    {
        for (arma::uword j = 0; j < R.n_cols; ++j)
            out << (j ? " " : "") << R(i, j).real() << ' ' << R(i, j).imag();
        out << '\n';
    }
}

arma::cx_mat build_correlation(const CorrelationSpec &spec)
{
    if (spec.M == 0)
        throw Error(Errc::BadDimensions, "build_correlation", "M must be positive");

    switch (spec.kind)
    {
    case CorrelationSpec::Kind::Identity:
        return arma::eye<arma::cx_mat>(spec.M, spec.M);

    case CorrelationSpec::Kind::Exponential:
    {
        if (!(std::abs(spec.a) < 1.0))
            throw Error(Errc::BadCoefficient, "build_correlation", "exponential coefficient must satisfy |a| < 1");

        // powers[n] = a^n, built by repeated products so that a = 0 gives an exact identity
        std::vector<std::complex<double>> powers(spec.M);
        powers[0] = 1.0;
        for (arma::uword n = 1; n < spec.M; ++n)
            powers[n] = powers[n - 1] * spec.a;

        arma::cx_mat R(spec.M, spec.M);
        for (arma::uword j = 0; j < spec.M; ++j)
            for (arma::uword i = 0; i < spec.M; ++i)
                R(i, j) = i <= j ? powers[j - i] : std::conj(powers[i - j]);
        return R;
    }

    case CorrelationSpec::Kind::Explicit:
    {
        const arma::cx_mat &R = spec.matrix;
        if (R.n_rows != R.n_cols || R.n_rows != spec.M)
            throw Error(Errc::BadDimensions, "build_correlation", "explicit correlation must be M x M");
        if (hermitian_defect(R) > hermitian_tol)
            throw Error(Errc::NonHermitian, "build_correlation", "explicit correlation is not Hermitian");
        arma::cx_mat H = 0.5 * (R + R.t());
        arma::vec eigs = arma::eig_sym(H);
        if (eigs.min() < -psd_tol)
            throw Error(Errc::NotPsd, "build_correlation",
                        "smallest eigenvalue " + std::to_string(eigs.min()) + " is negative");
        return H;
    }
    }
    throw Error(Errc::InvalidArgument, "build_correlation", "unknown correlation kind");
}

arma::cx_mat matrix_sqrt(const arma::cx_mat &R)
{
    if (R.n_rows != R.n_cols)
        throw Error(Errc::BadDimensions, "matrix_sqrt", "matrix must be square");
    if (hermitian_defect(R) > hermitian_tol)
        throw Error(Errc::NonHermitian, "matrix_sqrt", "matrix is not Hermitian");

    const arma::cx_mat H = 0.5 * (R + R.t());
    const double scale = std::max(arma::norm(H, "fro"), 1e-300);

    arma::cx_mat L;
    if (arma::chol(L, H, "lower"))
    {
        if (arma::norm(L * L.t() - H, "fro") <= 1e-12 * scale)
            return L;
    }

    arma::vec eigs;
    arma::cx_mat V;
    if (!arma::eig_sym(eigs, V, H))
        throw Error(Errc::NoConvergence, "matrix_sqrt", "eigendecomposition failed");
    if (eigs.min() < -psd_tol)
        throw Error(Errc::NotPsd, "matrix_sqrt", "smallest eigenvalue " + std::to_string(eigs.min()) + " is negative");

    arma::vec roots = arma::sqrt(arma::clamp(eigs, 0.0, arma::datum::inf));
    return V * arma::diagmat(arma::conv_to<arma::cx_vec>::from(roots)) * V.t();
}

std::mt19937_64 make_substream(const SeedTag &tag)
{
    std::uint64_t h = splitmix64(tag.master);
    h = splitmix64(h ^ tag.stream);
    h = splitmix64(h ^ tag.trial);
    h = splitmix64(h ^ tag.attempt);
    std::uint64_t g = splitmix64(h);
    std::seed_seq seq{std::uint32_t(h), std::uint32_t(h >> 32), std::uint32_t(g), std::uint32_t(g >> 32)};
    return std::mt19937_64(seq);
}

arma::cx_mat complex_gaussian(arma::uword rows, arma::uword cols, std::mt19937_64 &rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    arma::cx_mat Z(rows, cols);
    for (arma::uword n = 0; n < Z.n_elem; ++n)
    {
        double re = normal(rng);
        double im = normal(rng);
        Z(n) = {re, im};
    }
    return Z;
}

ChannelRealization sample_realization(arma::uword antennas, const arma::cx_mat &R_sqrt, arma::uword K,
                                      const SeedTag &tag)
{
    const arma::uword M = R_sqrt.is_empty() ? antennas : R_sqrt.n_rows;
    if (K == 0 || K >= M)
        throw Error(Errc::BadDimensions, "sample_realization",
                    "need 0 < K < M, got K = " + std::to_string(K) + ", M = " + std::to_string(M));

    auto rng = make_substream(tag);
    ChannelRealization out;
    out.tag = tag;
    arma::cx_mat Z = complex_gaussian(M, K, rng);
    out.H = R_sqrt.is_empty() ? std::move(Z) : arma::cx_mat(R_sqrt * Z);
    out.u = complex_gaussian(K, 1, rng);
    return out;
}

ChannelRealization sample_realization(const arma::cx_mat &R_sqrt, arma::uword K, const SeedTag &tag)
{
    if (R_sqrt.is_empty())
        throw Error(Errc::BadDimensions, "sample_realization", "square-root factor is empty");
    return sample_realization(R_sqrt.n_rows, R_sqrt, K, tag);
}

CorrelatedChannel::CorrelatedChannel(const CorrelationSpec &spec)
    : R_(build_correlation(spec))
{
    identity_ = spec.kind == CorrelationSpec::Kind::Identity ||
                (spec.kind == CorrelationSpec::Kind::Exponential && spec.a == std::complex<double>(0.0, 0.0));
    if (identity_)
    {
        eigs_ = arma::ones<arma::vec>(R_.n_rows);
        return;
    }
    sqrt_ = matrix_sqrt(R_);
    eigs_ = arma::clamp(arma::vec(arma::eig_sym(R_)), 0.0, arma::datum::inf);
}

ChannelRealization CorrelatedChannel::sample(arma::uword K, const SeedTag &tag) const
{
    return sample_realization(R_.n_rows, sqrt_, K, tag);
}

} // namespace srmimo
