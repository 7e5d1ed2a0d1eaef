#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "physmimo/common.hpp"
#include "physmimo/rng.hpp"

namespace physmimo {

struct SubspaceModel {
    Mat basis;           // U_s, M x K
    RVec singular_values; // leading min(K+1, rank) values, descending
    std::vector<std::string> warnings;
};

// K dominant left singular vectors of Y.
SubspaceModel signal_subspace(const Mat& Y, int K);

// G = Yp Xp^H (Xp Xp^H)^{-1}; Xp is K x T with full row rank.
Mat subspace_zf_resolve(const Mat& Yp, const Mat& Xp);

// QPSK quantization of G^H Yd.
Mat mf_detect(const Mat& Yd, const Mat& G);

// Least-squares channel from the pilot columns of Y (first Xp.cols() columns).
Mat pilot_based_estimate(const Mat& Y, const Mat& Xp);

// Gray map, two bits per symbol: (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
Vec qpsk_map(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> qpsk_demap(const Vec& symbols);
// Nearest constellation point; zero components go to the positive side.
Mat qpsk_quantize(const Mat& z);

struct PilotLayout {
    Mat pilots;                     // K x K scaled DFT, X X^H = K I
    Mat data;                       // K x (N - K) QPSK
    std::vector<std::uint8_t> bits; // row-major over data, 2 per symbol

    Mat block() const;              // [pilots, data]
};

Mat dft_pilots(int K);
PilotLayout make_pilot_layout(int K, int N, Rng& rng);

// Bits of a K x n symbol matrix, row-major.
std::vector<std::uint8_t> bits_of(const Mat& symbols);

} // namespace physmimo
