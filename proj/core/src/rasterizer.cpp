#include "relaygs/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relaygs/error.hpp"
#include "relaygs/mask.hpp"
#include "relaygs/parallel.hpp"

namespace relaygs {

namespace {

constexpr double kSh1 = 0.4886025119029199;  // degree-1 real SH basis constant

double mask_gate(MaskMode mode, double mask_logit, double epsilon) {
    switch (mode) {
        case MaskMode::kOff: return 1.0;
        case MaskMode::kApply: return binary_mask(mask_logit, epsilon);
        case MaskMode::kRelaxed: return sigmoid(mask_logit);
    }
    return 1.0;
}

std::optional<SplattedGaussian> project_one(const RenderInput& input, size_t i, const Camera& camera,
                                            const RenderConfig& config) {
    SplattedGaussian sp;
    sp.input_index = static_cast<int32_t>(i);

    const Eigen::Map<const Eigen::Vector3d> pos(&input.positions[3 * i]);
    const Eigen::Map<const Eigen::Vector3d> log_scale(&input.log_scales[3 * i]);
    const Eigen::Map<const Eigen::Vector4d> q_raw(&input.rotations[4 * i]);

    sp.cam_point = camera.to_camera(pos);
    const double z = sp.cam_point.z();
    if (z <= config.near_plane) return std::nullopt;

    sp.q_hat = quat_normalize(q_raw);
    sp.rot = quat_to_rotation(sp.q_hat);
    sp.scale = log_scale.array().exp();
    const Eigen::Matrix3d m3 = sp.rot * sp.scale.asDiagonal();
    sp.sigma3d = m3 * m3.transpose();

    const double x = sp.cam_point.x();
    const double y = sp.cam_point.y();
    const double fx = camera.focal_x;
    const double fy = camera.focal_y;
    sp.mean2d = {fx * x / z + camera.principal_x, fy * y / z + camera.principal_y};

    Eigen::Matrix<double, 2, 3> jac;
    jac << fx / z, 0.0, -fx * x / (z * z),
           0.0, fy / z, -fy * y / (z * z);
    sp.proj_lin = jac * camera.world_to_cam_rot;
    Eigen::Matrix2d cov2d = sp.proj_lin * sp.sigma3d * sp.proj_lin.transpose();
    cov2d(0, 0) += config.cov2d_floor;
    cov2d(1, 1) += config.cov2d_floor;
    sp.cov2d = cov2d;

    const double det = cov2d(0, 0) * cov2d(1, 1) - cov2d(0, 1) * cov2d(1, 0);
    if (!(det > 0.0)) throw InternalError("rasterizer: singular 2D covariance after flooring");
    sp.cov2d_inv << cov2d(1, 1) / det, -cov2d(0, 1) / det, -cov2d(1, 0) / det, cov2d(0, 0) / det;

    const double mid = 0.5 * (cov2d(0, 0) + cov2d(1, 1));
    const double disc = std::sqrt(std::max(0.0, mid * mid - det));
    const double lambda_max = mid + disc;
    sp.radius = config.sigma_cutoff * std::sqrt(std::max(0.0, lambda_max));

    // Pixel centers sit at integer + 0.5.
    sp.x0 = std::max(0, static_cast<int>(std::ceil(sp.mean2d.x() - sp.radius - 0.5)));
    sp.x1 = std::min(camera.width - 1, static_cast<int>(std::floor(sp.mean2d.x() + sp.radius - 0.5)));
    sp.y0 = std::max(0, static_cast<int>(std::ceil(sp.mean2d.y() - sp.radius - 0.5)));
    sp.y1 = std::min(camera.height - 1, static_cast<int>(std::floor(sp.mean2d.y() + sp.radius - 0.5)));
    if (sp.x0 > sp.x1 || sp.y0 > sp.y1) return std::nullopt;

    sp.depth = z;

    const int32_t src = input.source_index[i];
    const Eigen::Vector3d dc = input.cloud->color_dc(src);
    const Eigen::Map<const Eigen::Matrix<double, 9, 1>> sh(&input.cloud->sh1[9 * src]);
    const Eigen::Vector3d offset = pos - camera.center();
    sp.view_dist = offset.norm();
    sp.view_dir = offset / sp.view_dist;
    for (int ch = 0; ch < 3; ++ch) {
        sp.color_pre[ch] = dc[ch] + kSh1 * (-sp.view_dir.y() * sh[0 + ch] + sp.view_dir.z() * sh[3 + ch] -
                                            sp.view_dir.x() * sh[6 + ch]);
        sp.color[ch] = std::clamp(sp.color_pre[ch], 0.0, 1.0);
    }

    sp.opacity = sigmoid(input.opacity_logits[i]);
    sp.mask_value = mask_gate(config.mask_mode, input.cloud->mask_logits[src], config.mask_epsilon);
    sp.alpha_base = sp.opacity * sp.mask_value;
    return sp;
}

}  // namespace

RenderInput make_render_input(const GaussianCloud& cloud) {
    std::vector<int32_t> rows(cloud.size());
    std::iota(rows.begin(), rows.end(), 0);
    return make_render_input(cloud, rows);
}

RenderInput make_render_input(const GaussianCloud& cloud, const std::vector<int32_t>& rows) {
    RenderInput in;
    in.cloud = &cloud;
    in.source_index = rows;
    const size_t n = rows.size();
    in.positions.resize(3 * n);
    in.log_scales.resize(3 * n);
    in.rotations.resize(4 * n);
    in.opacity_logits.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const size_t s = static_cast<size_t>(rows[i]);
        for (int k = 0; k < 3; ++k) in.positions[3 * i + k] = cloud.positions[3 * s + k];
        for (int k = 0; k < 3; ++k) in.log_scales[3 * i + k] = cloud.log_scales[3 * s + k];
        for (int k = 0; k < 4; ++k) in.rotations[4 * i + k] = cloud.rotations[4 * s + k];
        in.opacity_logits[i] = cloud.opacity_logits[s];
    }
    return in;
}

std::optional<SplattedGaussian> project_gaussian(const GaussianPrimitive& g, const Camera& camera,
                                                 const RenderConfig& config) {
    GaussianCloud cloud;
    cloud.push_back(g);
    const RenderInput input = make_render_input(cloud);
    auto sp = project_one(input, 0, camera, config);
    return sp;
}

double gaussian_weight(const Eigen::Vector2d& pixel, const SplattedGaussian& splat) {
    const Eigen::Vector2d d = pixel - splat.mean2d;
    const double q = d.dot(splat.cov2d_inv * d);
    return std::exp(-0.5 * q);
}

Eigen::Vector3d composite_pixel(std::span<const std::pair<Eigen::Vector3d, double>> contributions,
                                const Eigen::Vector3d& background, double transmittance_min) {
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
    double transmittance = 1.0;
    for (const auto& [c, alpha] : contributions) {
        color += c * alpha * transmittance;
        transmittance *= 1.0 - alpha;
        if (transmittance < transmittance_min) break;
    }
    return color + background * transmittance;
}

RenderOutput render(const RenderInput& input, const Camera& camera, const RenderConfig& config) {
    const size_t n = input.size();
    const int width = camera.width;
    const int height = camera.height;

    RenderOutput out;
    out.config = config;
    out.width = width;
    out.height = height;
    out.image_pre = Image(width, height);
    out.image = Image(width, height);
    out.transmittance.assign(static_cast<size_t>(width) * height, 1.0);

    // Project all Gaussians (parallel, slot per input row, then compacted in
    // input order so downstream state is independent of the thread count).
    std::vector<std::optional<SplattedGaussian>> projected(n);
    parallel_for_chunks(n, [&](int, size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) projected[i] = project_one(input, i, camera, config);
    });
    for (auto& p : projected) {
        if (p) out.splats.push_back(std::move(*p));
    }

    std::sort(out.splats.begin(), out.splats.end(), [](const SplattedGaussian& a, const SplattedGaussian& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.input_index < b.input_index;
    });

    // Per-row splat lists; appending in depth order keeps each list sorted.
    std::vector<std::vector<int32_t>> row_splats(height);
    for (size_t s = 0; s < out.splats.size(); ++s) {
        const auto& sp = out.splats[s];
        for (int y = sp.y0; y <= sp.y1; ++y) row_splats[y].push_back(static_cast<int32_t>(s));
    }

    std::vector<std::vector<PixelContribution>> row_contribs(height);
    std::vector<std::vector<uint32_t>> row_counts(height);
    parallel_for_chunks(static_cast<size_t>(height), [&](int, size_t y_begin, size_t y_end) {
        for (size_t y = y_begin; y < y_end; ++y) {
            auto& contribs = row_contribs[y];
            auto& counts = row_counts[y];
            counts.assign(width, 0);
            for (int x = 0; x < width; ++x) {
                const Eigen::Vector2d pixel(x + 0.5, y + 0.5);
                Eigen::Vector3d color = Eigen::Vector3d::Zero();
                double transmittance = 1.0;
                uint32_t count = 0;
                for (const int32_t sid : row_splats[y]) {
                    const auto& sp = out.splats[sid];
                    if (x < sp.x0 || x > sp.x1) continue;
                    const double w = gaussian_weight(pixel, sp);
                    const double alpha = std::min(config.alpha_max, sp.alpha_base * w);
                    contribs.push_back({sid, w});
                    ++count;
                    if (alpha > 0.0) {
                        color += sp.color * (alpha * transmittance);
                        transmittance *= 1.0 - alpha;
                        if (transmittance < config.transmittance_min) break;
                    }
                }
                counts[x] = count;
                const size_t px = y * width + x;
                out.transmittance[px] = transmittance;
                const Eigen::Vector3d pre = color + config.background * transmittance;
                out.image_pre.set(x, static_cast<int>(y), pre);
                Eigen::Vector3d fin = camera.color_gain.cwiseProduct(pre) + camera.color_bias;
                fin = fin.cwiseMax(0.0).cwiseMin(1.0);
                out.image.set(x, static_cast<int>(y), fin);
            }
        }
    });

    // Flatten the per-row contribution buffers into one arena.
    out.contrib_offset.assign(static_cast<size_t>(width) * height + 1, 0);
    size_t total = 0;
    for (int y = 0; y < height; ++y) total += row_contribs[y].size();
    out.contribs.reserve(total);
    size_t cursor = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out.contrib_offset[static_cast<size_t>(y) * width + x] = static_cast<uint32_t>(cursor);
            cursor += row_counts[y][x];
        }
        out.contribs.insert(out.contribs.end(), row_contribs[y].begin(), row_contribs[y].end());
    }
    out.contrib_offset.back() = static_cast<uint32_t>(cursor);
    if (cursor != out.contribs.size()) throw InternalError("rasterizer: contribution arena mismatch");
    return out;
}

RenderGrads render_backward(const RenderOutput& out, const RenderInput& input, const Camera& camera,
                            const Image& d_image) {
    if (d_image.width != out.width || d_image.height != out.height)
        throw InternalError("render_backward: gradient image shape mismatch");
    const size_t n = input.size();
    const size_t n_splats = out.splats.size();
    const RenderConfig& config = out.config;

    RenderGrads grads;
    grads.d_positions.assign(3 * n, 0.0);
    grads.d_log_scales.assign(3 * n, 0.0);
    grads.d_rotations.assign(4 * n, 0.0);
    grads.d_opacity_logits.assign(n, 0.0);
    grads.d_colors_dc.assign(3 * n, 0.0);
    grads.d_sh1.assign(9 * n, 0.0);
    grads.d_mask_logits.assign(n, 0.0);

    // Per-splat accumulators: color (3), alpha_base (1), mean2d (2),
    // cov2d upper triangle (3) = 9 doubles per splat per worker.
    const int workers = std::max(1, thread_count());
    std::vector<std::vector<double>> acc(workers);
    std::vector<Eigen::Vector3d> gain_acc(workers, Eigen::Vector3d::Zero());
    std::vector<Eigen::Vector3d> bias_acc(workers, Eigen::Vector3d::Zero());

    parallel_for_chunks(static_cast<size_t>(out.height), [&](int worker, size_t y_begin, size_t y_end) {
        auto& a = acc[worker];
        if (a.empty()) a.assign(9 * n_splats, 0.0);
        std::vector<double> alphas;
        std::vector<double> trans_before;
        for (size_t y = y_begin; y < y_end; ++y) {
            for (int x = 0; x < out.width; ++x) {
                const size_t px = y * out.width + x;
                const uint32_t c0 = out.contrib_offset[px];
                const uint32_t c1 = out.contrib_offset[px + 1];
                const Eigen::Vector3d g_final = d_image.at(x, static_cast<int>(y));
                if (g_final.isZero(0.0)) continue;
                // Affine color tune chain (clamp gates the gradient).
                const Eigen::Vector3d pre = out.image_pre.at(x, static_cast<int>(y));
                Eigen::Vector3d g_pre = Eigen::Vector3d::Zero();
                for (int ch = 0; ch < 3; ++ch) {
                    const double affine = camera.color_gain[ch] * pre[ch] + camera.color_bias[ch];
                    if (affine <= 0.0 || affine >= 1.0) continue;
                    gain_acc[worker][ch] += g_final[ch] * pre[ch];
                    bias_acc[worker][ch] += g_final[ch];
                    g_pre[ch] = g_final[ch] * camera.color_gain[ch];
                }
                if (g_pre.isZero(0.0)) continue;

                // Forward replay of the compositing chain for this pixel.
                const size_t count = c1 - c0;
                alphas.resize(count);
                trans_before.resize(count);
                double transmittance = 1.0;
                const Eigen::Vector2d pixel(x + 0.5, y + 0.5);
                for (size_t k = 0; k < count; ++k) {
                    const auto& pc = out.contribs[c0 + k];
                    const auto& sp = out.splats[pc.splat];
                    const double alpha = std::min(config.alpha_max, sp.alpha_base * pc.weight);
                    alphas[k] = alpha;
                    trans_before[k] = transmittance;
                    transmittance *= 1.0 - alpha;
                }

                Eigen::Vector3d suffix = config.background * transmittance;  // running S
                for (size_t k = count; k-- > 0;) {
                    const auto& pc = out.contribs[c0 + k];
                    const auto& sp = out.splats[pc.splat];
                    const double alpha = alphas[k];
                    const double t_before = trans_before[k];
                    double* slot = &a[9 * pc.splat];
                    // d(color)
                    for (int ch = 0; ch < 3; ++ch) slot[ch] += g_pre[ch] * alpha * t_before;
                    // d(alpha)
                    double d_alpha = 0.0;
                    for (int ch = 0; ch < 3; ++ch)
                        d_alpha += g_pre[ch] * (sp.color[ch] * t_before - suffix[ch] / (1.0 - alpha));
                    suffix += sp.color * (alpha * t_before);
                    if (sp.alpha_base * pc.weight >= config.alpha_max) continue;  // clamped: no flow
                    slot[3] += d_alpha * pc.weight;  // d(alpha_base)
                    const double dw = d_alpha * sp.alpha_base;
                    const Eigen::Vector2d d = pixel - sp.mean2d;
                    const Eigen::Vector2d lam_d = sp.cov2d_inv * d;
                    const double scale = dw * pc.weight;
                    slot[4] += scale * lam_d.x();
                    slot[5] += scale * lam_d.y();
                    slot[6] += scale * 0.5 * lam_d.x() * lam_d.x();
                    slot[7] += scale * 0.5 * lam_d.x() * lam_d.y();
                    slot[8] += scale * 0.5 * lam_d.y() * lam_d.y();
                }
            }
        }
    });

    // Merge worker partials in worker order.
    std::vector<double> total(9 * n_splats, 0.0);
    for (int w = 0; w < workers; ++w) {
        if (acc[w].empty()) continue;
        for (size_t i = 0; i < total.size(); ++i) total[i] += acc[w][i];
        grads.d_gain += gain_acc[w];
        grads.d_bias += bias_acc[w];
    }

    // Per-splat parameter chains (disjoint writes per input row).
    parallel_for_chunks(n_splats, [&](int, size_t begin, size_t end) {
        for (size_t s = begin; s < end; ++s) {
            const auto& sp = out.splats[s];
            const double* slot = &total[9 * s];
            const size_t i = static_cast<size_t>(sp.input_index);
            const int32_t src = input.source_index[i];

            const Eigen::Vector3d d_color(slot[0], slot[1], slot[2]);
            const double d_alpha_base = slot[3];
            const Eigen::Vector2d d_mean2d(slot[4], slot[5]);
            Eigen::Matrix2d d_cov;
            d_cov << slot[6], slot[7], slot[7], slot[8];

            // View-dependent color -> dc, sh, direction.
            const Eigen::Map<const Eigen::Matrix<double, 9, 1>> sh(&input.cloud->sh1[9 * src]);
            Eigen::Vector3d d_dir = Eigen::Vector3d::Zero();
            for (int ch = 0; ch < 3; ++ch) {
                if (sp.color_pre[ch] <= 0.0 || sp.color_pre[ch] >= 1.0) continue;
                grads.d_colors_dc[3 * i + ch] += d_color[ch];
                grads.d_sh1[9 * i + 0 + ch] += d_color[ch] * (-kSh1 * sp.view_dir.y());
                grads.d_sh1[9 * i + 3 + ch] += d_color[ch] * (kSh1 * sp.view_dir.z());
                grads.d_sh1[9 * i + 6 + ch] += d_color[ch] * (-kSh1 * sp.view_dir.x());
                d_dir.x() += d_color[ch] * (-kSh1 * sh[6 + ch]);
                d_dir.y() += d_color[ch] * (-kSh1 * sh[0 + ch]);
                d_dir.z() += d_color[ch] * (kSh1 * sh[3 + ch]);
            }
            Eigen::Vector3d d_pos =
                (d_dir - sp.view_dir * sp.view_dir.dot(d_dir)) / sp.view_dist;

            // alpha_base = opacity * mask
            const double d_opacity = d_alpha_base * sp.mask_value;
            grads.d_opacity_logits[i] += d_opacity * sp.opacity * (1.0 - sp.opacity);
            if (config.mask_mode != MaskMode::kOff) {
                const double m_logit = input.cloud->mask_logits[src];
                grads.d_mask_logits[i] += d_alpha_base * sp.opacity * sigmoid_grad(m_logit);
            }

            // cov2d = P Sigma P^T with P = J*W; floor is an additive constant.
            const Eigen::Matrix<double, 2, 3>& p_lin = sp.proj_lin;
            const Eigen::Matrix3d d_sigma = p_lin.transpose() * d_cov * p_lin;
            const Eigen::Matrix<double, 2, 3> d_plin = 2.0 * d_cov * p_lin * sp.sigma3d;
            const Eigen::Matrix<double, 2, 3> d_jac = d_plin * camera.world_to_cam_rot.transpose();

            const double xc = sp.cam_point.x(), yc = sp.cam_point.y(), zc = sp.cam_point.z();
            const double fx = camera.focal_x, fy = camera.focal_y;
            Eigen::Matrix<double, 2, 3> jac;
            jac << fx / zc, 0.0, -fx * xc / (zc * zc),
                   0.0, fy / zc, -fy * yc / (zc * zc);
            Eigen::Vector3d d_cam = jac.transpose() * d_mean2d;
            d_cam.x() += d_jac(0, 2) * (-fx / (zc * zc));
            d_cam.y() += d_jac(1, 2) * (-fy / (zc * zc));
            d_cam.z() += d_jac(0, 0) * (-fx / (zc * zc)) + d_jac(1, 1) * (-fy / (zc * zc)) +
                         d_jac(0, 2) * (2.0 * fx * xc / (zc * zc * zc)) +
                         d_jac(1, 2) * (2.0 * fy * yc / (zc * zc * zc));
            d_pos += camera.world_to_cam_rot.transpose() * d_cam;

            // Sigma = M M^T, M = R diag(s)
            const Eigen::Matrix3d m3 = sp.rot * sp.scale.asDiagonal();
            const Eigen::Matrix3d d_m3 = 2.0 * d_sigma * m3;
            const Eigen::Matrix3d d_rot = d_m3 * sp.scale.asDiagonal();
            for (int k = 0; k < 3; ++k) {
                const double d_scale = sp.rot.col(k).dot(d_m3.col(k));
                grads.d_log_scales[3 * i + k] += d_scale * sp.scale[k];
            }
            const Eigen::Vector4d d_qhat = quat_rotation_backward(sp.q_hat, d_rot);
            const Eigen::Map<const Eigen::Vector4d> q_raw(&input.rotations[4 * i]);
            const Eigen::Vector4d d_q = quat_normalize_backward(q_raw, d_qhat);
            for (int k = 0; k < 4; ++k) grads.d_rotations[4 * i + k] += d_q[k];

            for (int k = 0; k < 3; ++k) grads.d_positions[3 * i + k] += d_pos[k];
        }
    });

    return grads;
}

}  // namespace relaygs
