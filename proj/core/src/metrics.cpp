#include "relaygs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relaygs/error.hpp"

namespace relaygs {

namespace {

constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(size);
    const double center = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - center;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// One channel as a dense plane.
struct Plane {
    int w = 0, h = 0;
    std::vector<double> v;
    Plane() = default;
    Plane(int w_, int h_) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, 0.0) {}
    double& at(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
    double at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

// Valid-region separable correlation: out is (h-kh+1) x (w-kw+1).
Plane sepconv_valid(const Plane& in, const std::vector<double>& kx, const std::vector<double>& ky) {
    const int kw = static_cast<int>(kx.size());
    const int kh = static_cast<int>(ky.size());
    Plane rows(in.w - kw + 1, in.h);
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < rows.w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < kw; ++j) acc += kx[j] * in.at(x + j, y);
            rows.at(x, y) = acc;
        }
    Plane out(rows.w, in.h - kh + 1);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < kh; ++j) acc += ky[j] * rows.at(x, y + j);
            out.at(x, y) = acc;
        }
    return out;
}

// Adjoint of sepconv_valid: scatters output-sized gradients back to input size.
Plane sepconv_valid_adjoint(const Plane& dout, int in_w, int in_h, const std::vector<double>& kx,
                            const std::vector<double>& ky) {
    const int kw = static_cast<int>(kx.size());
    const int kh = static_cast<int>(ky.size());
    Plane rows(dout.w, in_h);
    for (int y = 0; y < dout.h; ++y)
        for (int x = 0; x < dout.w; ++x) {
            const double g = dout.at(x, y);
            if (g == 0.0) continue;
            for (int j = 0; j < kh; ++j) rows.at(x, y + j) += ky[j] * g;
        }
    Plane din(in_w, in_h);
    for (int y = 0; y < in_h; ++y)
        for (int x = 0; x < rows.w; ++x) {
            const double g = rows.at(x, y);
            if (g == 0.0) continue;
            for (int j = 0; j < kw; ++j) din.at(x + j, y) += kx[j] * g;
        }
    return din;
}

Plane extract_channel(const Image& img, int ch) {
    Plane p(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) p.at(x, y) = img.pixel(x, y)[ch];
    return p;
}

double ssim_impl(const Image& a, const Image& b, int window, double sigma, std::vector<double>* grad_a) {
    if (!a.same_shape(b)) throw ConfigError("ssim: image shape mismatch");
    if (a.width == 0 || a.height == 0) throw ConfigError("ssim: empty image");

    const int kw = std::min(window, a.width);
    const int kh = std::min(window, a.height);
    const auto kern_x = gaussian_kernel(kw, sigma);
    const auto kern_y = gaussian_kernel(kh, sigma);
    const int ow = a.width - kw + 1;
    const int oh = a.height - kh + 1;
    const double count = 3.0 * ow * oh;

    if (grad_a) {
        grad_a->assign(a.size(), 0.0);
    }

    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        const Plane x = extract_channel(a, ch);
        const Plane y = extract_channel(b, ch);
        Plane x2(a.width, a.height), y2(a.width, a.height), xy(a.width, a.height);
        for (size_t i = 0; i < x.v.size(); ++i) {
            x2.v[i] = x.v[i] * x.v[i];
            y2.v[i] = y.v[i] * y.v[i];
            xy.v[i] = x.v[i] * y.v[i];
        }
        const Plane mx = sepconv_valid(x, kern_x, kern_y);
        const Plane my = sepconv_valid(y, kern_x, kern_y);
        const Plane mxx = sepconv_valid(x2, kern_x, kern_y);
        const Plane myy = sepconv_valid(y2, kern_x, kern_y);
        const Plane mxy = sepconv_valid(xy, kern_x, kern_y);

        Plane dmx(ow, oh), dmxx(ow, oh), dmxy(ow, oh);
        for (int py = 0; py < oh; ++py) {
            for (int px = 0; px < ow; ++px) {
                const double ux = mx.at(px, py);
                const double uy = my.at(px, py);
                const double vx = mxx.at(px, py) - ux * ux;
                const double vy = myy.at(px, py) - uy * uy;
                const double cxy = mxy.at(px, py) - ux * uy;
                const double a1 = 2.0 * ux * uy + kSsimC1;
                const double a2 = 2.0 * cxy + kSsimC2;
                const double b1 = ux * ux + uy * uy + kSsimC1;
                const double b2 = vx + vy + kSsimC2;
                const double s = (a1 * a2) / (b1 * b2);
                total += s;
                if (!grad_a) continue;
                const double g = 1.0 / count;  // d(mean)/d(s)
                const double da1 = g * a2 / (b1 * b2);
                const double da2 = g * a1 / (b1 * b2);
                const double db1 = -g * s / b1;
                const double db2 = -g * s / b2;
                const double dvx = db2;
                const double dcxy = 2.0 * da2;
                dmx.at(px, py) = 2.0 * uy * da1 + 2.0 * ux * db1 - 2.0 * ux * dvx - uy * dcxy;
                dmxx.at(px, py) = dvx;
                dmxy.at(px, py) = dcxy;
            }
        }
        if (grad_a) {
            const Plane gx_means = sepconv_valid_adjoint(dmx, a.width, a.height, kern_x, kern_y);
            const Plane gx2 = sepconv_valid_adjoint(dmxx, a.width, a.height, kern_x, kern_y);
            const Plane gxy = sepconv_valid_adjoint(dmxy, a.width, a.height, kern_x, kern_y);
            for (int py = 0; py < a.height; ++py)
                for (int px = 0; px < a.width; ++px) {
                    const double g =
                        gx_means.at(px, py) + 2.0 * x.at(px, py) * gx2.at(px, py) + y.at(px, py) * gxy.at(px, py);
                    (*grad_a)[3 * (static_cast<size_t>(py) * a.width + px) + ch] += g;
                }
        }
    }
    return total / count;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ConfigError("psnr: image shape mismatch");
    double mse = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b, int window, double sigma) {
    return ssim_impl(a, b, window, sigma, nullptr);
}

double ssim_with_grad(const Image& a, const Image& b, std::vector<double>& grad_a, int window, double sigma) {
    return ssim_impl(a, b, window, sigma, &grad_a);
}

double l1_loss(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ConfigError("l1_loss: image shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += std::abs(a.data[i] - b.data[i]);
    return acc / static_cast<double>(a.size());
}

double photometric_loss(const Image& a, const Image& b, double lambda, int window, Image* grad_a) {
    const double l1 = l1_loss(a, b);
    if (lambda == 0.0) {
        if (grad_a) {
            *grad_a = Image(a.width, a.height);
            const double scale = 1.0 / static_cast<double>(a.size());
            for (size_t i = 0; i < a.size(); ++i) {
                const double d = a.data[i] - b.data[i];
                grad_a->data[i] = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
            }
        }
        return l1;
    }
    std::vector<double> ssim_grad;
    const double s = grad_a ? ssim_with_grad(a, b, ssim_grad, window) : ssim(a, b, window);
    const double loss = (1.0 - lambda) * l1 + lambda * dssim(s);
    if (grad_a) {
        *grad_a = Image(a.width, a.height);
        const double l1_scale = (1.0 - lambda) / static_cast<double>(a.size());
        for (size_t i = 0; i < a.size(); ++i) {
            const double d = a.data[i] - b.data[i];
            const double dl1 = d > 0.0 ? l1_scale : (d < 0.0 ? -l1_scale : 0.0);
            grad_a->data[i] = dl1 - 0.5 * lambda * ssim_grad[i];
        }
    }
    return loss;
}

std::string MetricReport::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "views = " << views.size() << "\n";
    for (size_t i = 0; i < views.size(); ++i) {
        os << "view." << i << ".camera = " << views[i].camera_id << "\n";
        os << "view." << i << ".frame = " << views[i].frame << "\n";
        os << "view." << i << ".psnr = " << views[i].psnr << "\n";
        os << "view." << i << ".ssim = " << views[i].ssim << "\n";
    }
    os << "mean_psnr = " << mean_psnr << "\n";
    os << "mean_ssim = " << mean_ssim << "\n";
    for (size_t i = 0; i < loss_curve_files.size(); ++i) {
        os << "loss_curve." << i << " = " << loss_curve_files[i] << "\n";
    }
    return os.str();
}

}  // namespace relaygs
