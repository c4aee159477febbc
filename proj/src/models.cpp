#include "skge/models.hpp"

#include "skge/error.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>

namespace skge {

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::TransE: return "TransE";
    case Algorithm::RESCAL: return "RESCAL";
    case Algorithm::HolE: return "HolE";
    }
    return "?";
}

std::string_view to_string(Norm n) noexcept { return n == Norm::L1 ? "L1" : "L2"; }

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Below this size the O(d^2) loop beats the transform.
constexpr std::size_t kFftThreshold = 48;

}  // namespace

Algorithm parse_algorithm(std::string_view s) {
    const auto l = lower(s);
    if (l == "transe") return Algorithm::TransE;
    if (l == "rescal") return Algorithm::RESCAL;
    if (l == "hole") return Algorithm::HolE;
    throw ParameterError("unknown algorithm '" + std::string(s) + "' (expected transe, rescal or hole)");
}

Norm parse_norm(std::string_view s) {
    const auto l = lower(s);
    if (l == "l1") return Norm::L1;
    if (l == "l2") return Norm::L2;
    throw ParameterError("unknown norm '" + std::string(s) + "' (expected L1 or L2)");
}

EmbeddingModel::EmbeddingModel(const ModelConfig& config, std::size_t entities, std::size_t relations)
    : config_(config), entities_(entities), relations_(relations) {
    if (config.dimension == 0)
        throw ParameterError("embedding dimension must be >= 1");
    const std::size_t d = config.dimension;
    relation_width_ = config.algorithm == Algorithm::RESCAL ? d * d : d;
    entity_data_.assign(entities * d, 0.0);
    relation_data_.assign(relations * relation_width_, 0.0);
}

bool EmbeddingModel::all_finite() const noexcept {
    auto finite = [](double x) { return std::isfinite(x); };
    return std::all_of(entity_data_.begin(), entity_data_.end(), finite) &&
           std::all_of(relation_data_.begin(), relation_data_.end(), finite);
}

void EmbeddingModel::check(const Triple& t) const {
    if (t.head >= entities_ || t.tail >= entities_)
        throw ParameterError("entity id out of range (" + std::to_string(std::max(t.head, t.tail)) + " >= " +
                             std::to_string(entities_) + ")");
    if (t.relation >= relations_)
        throw ParameterError("relation id out of range (" + std::to_string(t.relation) + " >= " +
                             std::to_string(relations_) + ")");
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ParameterError("vector length mismatch (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
}

std::vector<double> correlate_direct(std::span<const double> a, std::span<const double> b) {
    const std::size_t d = a.size();
    std::vector<double> out(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0, j = k; i < d; ++i, j = (j + 1 == d ? 0 : j + 1))
            acc += a[i] * b[j];
        out[k] = acc;
    }
    return out;
}

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b) {
    const std::size_t d = a.size();
    std::vector<double> out(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            acc += a[i] * b[(k + d - i) % d];
        out[k] = acc;
    }
    return out;
}

// Eigen's FFT caches twiddle tables per size and is not safe to share.
Eigen::FFT<double>& thread_fft() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

template <bool Conjugate>
std::vector<double> spectral_product(std::span<const double> a, std::span<const double> b) {
    const std::size_t d = a.size();
    if (d == 0)
        return {};
    if (d == 1)
        return {a[0] * b[0]};
    auto& fft = thread_fft();
    std::vector<std::complex<double>> va(a.begin(), a.end()), vb(b.begin(), b.end());
    std::vector<std::complex<double>> fa, fb, back;
    fft.fwd(fa, va);
    fft.fwd(fb, vb);
    for (std::size_t i = 0; i < d; ++i)
        fa[i] = (Conjugate ? std::conj(fa[i]) : fa[i]) * fb[i];
    fft.inv(back, fa);
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i)
        out[i] = back[i].real();
    return out;
}

}  // namespace

std::vector<double> circular_correlation_fft(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    return spectral_product<true>(a, b);
}

std::vector<double> circular_correlation(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    return a.size() < kFftThreshold ? correlate_direct(a, b) : spectral_product<true>(a, b);
}

std::vector<double> circular_convolution(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    return a.size() < kFftThreshold ? convolve_direct(a, b) : spectral_product<false>(a, b);
}

double score(const EmbeddingModel& model, const Triple& triple) {
    model.check(triple);
    const std::size_t d = model.dim();
    auto h = model.entity(triple.head);
    auto t = model.entity(triple.tail);
    auto r = model.relation(triple.relation);

    switch (model.algorithm()) {
    case Algorithm::TransE: {
        double acc = 0.0;
        if (model.config().transe_norm == Norm::L1) {
            for (std::size_t i = 0; i < d; ++i)
                acc += std::abs(h[i] + r[i] - t[i]);
            return -acc;
        }
        for (std::size_t i = 0; i < d; ++i) {
            const double v = h[i] + r[i] - t[i];
            acc += v * v;
        }
        return -std::sqrt(acc);
    }
    case Algorithm::RESCAL: {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                row += r[i * d + j] * t[j];
            acc += h[i] * row;
        }
        return acc;
    }
    case Algorithm::HolE: {
        const auto corr = circular_correlation(h, t);
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            acc += r[k] * corr[k];
        return acc;
    }
    }
    return 0.0;
}

namespace {

std::span<double> find_or_insert(std::vector<GradientRow>& rows, std::uint32_t id, std::size_t width) {
    for (auto& row : rows)
        if (row.id == id)
            return row.values;
    rows.push_back({id, std::vector<double>(width, 0.0)});
    return rows.back().values;
}

}  // namespace

std::span<double> SparseGradient::entity_row(std::uint32_t id, std::size_t width) {
    return find_or_insert(entities, id, width);
}

std::span<double> SparseGradient::relation_row(std::uint32_t id, std::size_t width) {
    return find_or_insert(relations, id, width);
}

void accumulate_score_gradient(const EmbeddingModel& model, const Triple& triple, double coeff,
                               SparseGradient& grad) {
    model.check(triple);
    const std::size_t d = model.dim();
    auto h = model.entity(triple.head);
    auto t = model.entity(triple.tail);
    auto r = model.relation(triple.relation);

    auto gh = grad.entity_row(triple.head, d);
    auto gt = grad.entity_row(triple.tail, d);
    auto gr = grad.relation_row(triple.relation, model.relation_width());

    switch (model.algorithm()) {
    case Algorithm::TransE: {
        // d(-||v||)/dh = -dv, d/dr = -dv, d/dt = +dv with v = h + r - t.
        std::vector<double> v(d);
        for (std::size_t i = 0; i < d; ++i)
            v[i] = h[i] + r[i] - t[i];
        if (model.config().transe_norm == Norm::L1) {
            for (auto& x : v)
                x = (x > 0.0) - (x < 0.0);
        } else {
            double norm = 0.0;
            for (double x : v)
                norm += x * x;
            norm = std::sqrt(norm);
            if (norm == 0.0)
                return;
            for (auto& x : v)
                x /= norm;
        }
        for (std::size_t i = 0; i < d; ++i) {
            gh[i] -= coeff * v[i];
            gr[i] -= coeff * v[i];
            gt[i] += coeff * v[i];
        }
        return;
    }
    case Algorithm::RESCAL: {
        for (std::size_t i = 0; i < d; ++i) {
            double wt = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                wt += r[i * d + j] * t[j];
                gt[j] += coeff * h[i] * r[i * d + j];
                gr[i * d + j] += coeff * h[i] * t[j];
            }
            gh[i] += coeff * wt;
        }
        return;
    }
    case Algorithm::HolE: {
        const auto dr = circular_correlation(h, t);
        const auto dh = circular_correlation(r, t);
        const auto dt = circular_convolution(r, h);
        for (std::size_t i = 0; i < d; ++i) {
            gr[i] += coeff * dr[i];
            gh[i] += coeff * dh[i];
            gt[i] += coeff * dt[i];
        }
        return;
    }
    }
}

LossAndGradient loss_and_grad(const EmbeddingModel& model, const Triple& positive, const Triple& negative,
                              double margin) {
    if (!(margin > 0.0))
        throw ParameterError("margin must be > 0");
    const bool head_corrupt = negative.head != positive.head && negative.tail == positive.tail;
    const bool tail_corrupt = negative.tail != positive.tail && negative.head == positive.head;
    if (negative.relation != positive.relation || !(head_corrupt || tail_corrupt))
        throw ParameterError("negative triple must differ from the positive in exactly one of head/tail");

    LossAndGradient out;
    const double violation = margin - score(model, positive) + score(model, negative);
    if (violation <= 0.0)
        return out;
    out.loss = violation;
    accumulate_score_gradient(model, positive, -1.0, out.gradient);
    accumulate_score_gradient(model, negative, 1.0, out.gradient);
    return out;
}

}  // namespace skge
