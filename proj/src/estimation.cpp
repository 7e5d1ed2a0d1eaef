#include "physmimo/estimation.hpp"

#include <sstream>

namespace physmimo {

SubspaceModel signal_subspace(const Mat& Y, int K)
{
    const Eigen::Index M = Y.rows(), N = Y.cols();
    if (K < 1 || K > std::min(M, N)) {
        std::ostringstream os;
        os << "signal_subspace: K=" << K << " must be in [1, min(M, N)=" << std::min(M, N) << "]";
        throw ConfigError(os.str());
    }
    SubspaceModel out;
    RVec sv;
    if (M <= N) {
        // Gram route: M x M eigenproblem, ascending eigenvalues.
        const Mat gram = Y * Y.adjoint();
        Eigen::SelfAdjointEigenSolver<Mat> es(gram);
        if (es.info() != Eigen::Success)
            throw NumericalError("signal_subspace: eigendecomposition failed");
        out.basis.resize(M, K);
        sv.resize(M);
        for (Eigen::Index i = 0; i < M; ++i)
            sv(i) = std::sqrt(std::max(0.0, es.eigenvalues()(M - 1 - i)));
        for (int k = 0; k < K; ++k)
            out.basis.col(k) = es.eigenvectors().col(M - 1 - k);
    } else {
        Eigen::BDCSVD<Mat> svd(Y, Eigen::ComputeThinU);
        sv = svd.singularValues();
        out.basis = svd.matrixU().leftCols(K);
    }
    const Eigen::Index keep = std::min<Eigen::Index>(K + 1, sv.size());
    out.singular_values = sv.head(keep);
    if (K < sv.size() && std::abs(sv(K - 1) - sv(K)) <= 1e-12 * std::max(sv(0), 1e-300)) {
        std::ostringstream os;
        os << "signal_subspace: sigma_K = sigma_K+1 = " << sv(K - 1) << "; subspace is ill-defined";
        out.warnings.push_back(os.str());
    }
    return out;
}

namespace {

Mat right_ls(const Mat& B, const Mat& Xp, const char* who)
{
    if (Xp.rows() < 1 || Xp.cols() < Xp.rows()) {
        std::ostringstream os;
        os << who << ": pilot block must be K x T with T >= K, got " << Xp.rows() << " x " << Xp.cols();
        throw ConfigError(os.str());
    }
    const Mat A = Xp * Xp.adjoint();
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        std::ostringstream os;
        os << who << ": pilot block is singular";
        throw ConfigError(os.str());
    }
    // B Xp^H A^{-1} with A Hermitian.
    return lu.solve((B * Xp.adjoint()).adjoint()).adjoint();
}

} // namespace

Mat subspace_zf_resolve(const Mat& Yp, const Mat& Xp)
{
    if (Yp.cols() != Xp.cols())
        throw ShapeError("subspace_zf_resolve: projected pilot block and pilots have different lengths");
    return right_ls(Yp, Xp, "subspace_zf_resolve");
}

Mat mf_detect(const Mat& Yd, const Mat& G)
{
    if (G.rows() != Yd.rows())
        throw ShapeError("mf_detect: channel rows do not match the data block");
    return qpsk_quantize(G.adjoint() * Yd);
}

Mat pilot_based_estimate(const Mat& Y, const Mat& Xp)
{
    if (Y.cols() < Xp.cols())
        throw ShapeError("pilot_based_estimate: block shorter than the pilot sequence");
    return right_ls(Y.leftCols(Xp.cols()), Xp, "pilot_based_estimate");
}

Vec qpsk_map(const std::vector<std::uint8_t>& bits)
{
    if (bits.size() % 2 != 0)
        throw ShapeError("qpsk_map: odd bit count " + std::to_string(bits.size()));
    const double a = 1.0 / std::sqrt(2.0);
    Vec out(static_cast<Eigen::Index>(bits.size() / 2));
    for (std::size_t i = 0; i < bits.size() / 2; ++i)
        out(static_cast<Eigen::Index>(i)) = cd(bits[2 * i] ? -a : a, bits[2 * i + 1] ? -a : a);
    return out;
}

std::vector<std::uint8_t> qpsk_demap(const Vec& symbols)
{
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * symbols.size()));
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        bits[2 * static_cast<std::size_t>(i)] = symbols(i).real() < 0;
        bits[2 * static_cast<std::size_t>(i) + 1] = symbols(i).imag() < 0;
    }
    return bits;
}

Mat qpsk_quantize(const Mat& z)
{
    const double a = 1.0 / std::sqrt(2.0);
    return z.unaryExpr([a](cd v) { return cd(v.real() < 0 ? -a : a, v.imag() < 0 ? -a : a); });
}

Mat PilotLayout::block() const
{
    Mat X(pilots.rows(), pilots.cols() + data.cols());
    X << pilots, data;
    return X;
}

Mat dft_pilots(int K)
{
    if (K < 1)
        throw ConfigError("dft_pilots: K must be >= 1");
    Mat F(K, K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < K; ++c)
            F(r, c) = std::polar(1.0, -2.0 * M_PI * ((static_cast<long long>(r) * c) % K) / K);
    return F;
}

PilotLayout make_pilot_layout(int K, int N, Rng& rng)
{
    if (N <= K)
        throw ConfigError("pilot layout: N=" + std::to_string(N) + " leaves no data symbols after K=" +
                          std::to_string(K) + " pilots");
    PilotLayout pl;
    pl.pilots = dft_pilots(K);
    const std::size_t n = static_cast<std::size_t>(K) * (N - K);
    pl.bits.resize(2 * n);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : pl.bits)
        b = static_cast<std::uint8_t>(bit(rng));
    const Vec s = qpsk_map(pl.bits);
    pl.data.resize(K, N - K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < N - K; ++c)
            pl.data(r, c) = s(static_cast<Eigen::Index>(r) * (N - K) + c);
    return pl;
}

std::vector<std::uint8_t> bits_of(const Mat& symbols)
{
    Vec flat(symbols.size());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < symbols.rows(); ++r)
        for (Eigen::Index c = 0; c < symbols.cols(); ++c)
            flat(k++) = symbols(r, c);
    return qpsk_demap(flat);
}

} // namespace physmimo
