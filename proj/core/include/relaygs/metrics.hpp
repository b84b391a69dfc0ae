#pragma once

#include <string>
#include <vector>

#include "relaygs/image.hpp"

namespace relaygs {

// Peak signal-to-noise ratio on [0,1] images: 10*log10(1/MSE).
// Identical images return +infinity.
double psnr(const Image& a, const Image& b);

// Mean local SSIM with a Gaussian window (valid region, per channel).
// Images smaller than the window fall back to one whole-image window.
double ssim(const Image& a, const Image& b, int window = 11, double sigma = 1.5);

// SSIM plus d(SSIM)/d(a); grad_a is sized like a.data and overwritten.
double ssim_with_grad(const Image& a, const Image& b, std::vector<double>& grad_a, int window = 11,
                      double sigma = 1.5);

inline double dssim(double ssim_value) { return (1.0 - ssim_value) / 2.0; }

// Mean absolute difference.
double l1_loss(const Image& a, const Image& b);

// Photometric training loss (1-lambda)*L1 + lambda*D-SSIM. When grad_a is
// non-null it receives d(loss)/d(a).
double photometric_loss(const Image& a, const Image& b, double lambda, int window, Image* grad_a);

// Per-view quality numbers plus per-stage loss traces, serialized as a flat
// key = value report.
struct MetricReport {
    struct View {
        int camera_id = 0;
        int frame = 0;
        double psnr = 0.0;
        double ssim = 0.0;
    };
    std::vector<View> views;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    std::vector<std::string> loss_curve_files;

    std::string to_text() const;
};

}  // namespace relaygs
