#include "skge/analytics.hpp"

#include "skge/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace skge {

std::string_view to_string(ProjectionMethod m) noexcept { return m == ProjectionMethod::TSNE ? "tsne" : "pca"; }

ProjectionMethod parse_projection_method(std::string_view s) {
    std::string l(s);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "tsne" || l == "t-sne")
        return ProjectionMethod::TSNE;
    if (l == "pca")
        return ProjectionMethod::PCA;
    throw ParameterError("unknown projection method '" + std::string(s) + "' (expected tsne or pca)");
}

namespace {

// Row-wise input affinities P(j|i) with the Gaussian precision bisected so
// that the entropy of each row matches log(perplexity).
std::vector<double> conditional_affinities(const std::vector<double>& sq_dist, std::size_t n, double perplexity) {
    std::vector<double> p(n * n, 0.0);
    const double target = std::log(perplexity);
    constexpr double kTol = 1e-5;
    constexpr int kMaxSteps = 200;

    for (std::size_t i = 0; i < n; ++i) {
        const double* d = sq_dist.data() + i * n;
        double* row = p.data() + i * n;
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                dmin = std::min(dmin, d[j]);

        double beta = 1.0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (int step = 0; step < kMaxSteps; ++step) {
            double sum = 0.0, weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    row[j] = 0.0;
                    continue;
                }
                const double shifted = d[j] - dmin;
                row[j] = std::exp(-beta * shifted);
                sum += row[j];
                weighted += shifted * row[j];
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            for (std::size_t j = 0; j < n; ++j)
                row[j] /= sum;
            const double diff = entropy - target;
            if (std::abs(diff) < kTol)
                break;
            if (diff > 0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
            } else {
                hi = beta;
                beta = std::isinf(lo) ? beta / 2.0 : (beta + lo) / 2.0;
            }
        }
    }
    return p;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& num, double num_sum, std::size_t n) {
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const double pij = p[i * n + j];
            const double qij = std::max(num[i * n + j] / num_sum, 1e-300);
            kl += pij * std::log(pij / qij);
        }
    return kl;
}

}  // namespace

std::vector<Point2> tsne(const Matrix& data, const TsneParams& params, std::vector<double>* kl_trace) {
    const std::size_t n = data.rows;
    const std::size_t dim = data.cols;
    if (n < 3)
        throw ParameterError("t-SNE needs at least 3 points");
    if (!(params.perplexity > 0.0) || params.perplexity >= static_cast<double>(n - 1) / 3.0)
        throw ParameterError("perplexity must be in (0, (N-1)/3) = (0, " +
                             std::to_string(static_cast<double>(n - 1) / 3.0) + ") for N=" + std::to_string(n));
    if (!(params.learning_rate > 0.0))
        throw ParameterError("learning rate must be > 0");

    // Center and scale to unit max-abs so the bandwidth search starts well
    // conditioned.
    std::vector<double> x(data.values);
    for (std::size_t c = 0; c < dim; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            mean += x[r * dim + c];
        mean /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r)
            x[r * dim + c] -= mean;
    }
    double maxabs = 0.0;
    for (double v : x)
        maxabs = std::max(maxabs, std::abs(v));
    if (maxabs > 0.0)
        for (auto& v : x)
            v /= maxabs;

    std::vector<double> sq(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = x[i * dim + c] - x[j * dim + c];
                acc += diff * diff;
            }
            sq[i * n + j] = sq[j * n + i] = acc;
        }

    std::vector<double> p = conditional_affinities(sq, n, params.perplexity);
    const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::max((p[i * n + j] + p[j * n + i]) * inv2n, 1e-12);
            p[i * n + j] = p[j * n + i] = v;
        }
    for (std::size_t i = 0; i < n; ++i)
        p[i * n + i] = 0.0;

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1e-4);
    std::vector<double> y(n * 2), update(n * 2, 0.0), gains(n * 2, 1.0), grad(n * 2);
    for (auto& v : y)
        v = gauss(rng);

    std::vector<double> num(n * n, 0.0);
    if (kl_trace)
        kl_trace->clear();
    for (std::size_t iter = 0; iter < params.iterations; ++iter) {
        const bool exaggerate = iter < params.exaggeration_iterations;
        const double exag = exaggerate ? params.early_exaggeration : 1.0;
        const double momentum = exaggerate ? 0.5 : 0.8;

        double num_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j];
                const double dy = y[2 * i + 1] - y[2 * j + 1];
                const double v = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = num[j * n + i] = v;
                num_sum += 2.0 * v;
            }

        for (std::size_t i = 0; i < n; ++i) {
            double gx = 0.0, gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                const double w = num[i * n + j];
                const double mult = (exag * p[i * n + j] - w / num_sum) * w;
                gx += mult * (y[2 * i] - y[2 * j]);
                gy += mult * (y[2 * i + 1] - y[2 * j + 1]);
            }
            grad[2 * i] = 4.0 * gx;
            grad[2 * i + 1] = 4.0 * gy;
        }

        for (std::size_t k = 0; k < 2 * n; ++k) {
            const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
            gains[k] = same_sign ? gains[k] * 0.8 : gains[k] + 0.2;
            gains[k] = std::max(gains[k], 0.01);
            update[k] = momentum * update[k] - params.learning_rate * gains[k] * grad[k];
            y[k] += update[k];
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += y[2 * i];
            my += y[2 * i + 1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= mx;
            y[2 * i + 1] -= my;
        }

        if (kl_trace) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double dx = y[2 * i] - y[2 * j];
                    const double dy = y[2 * i + 1] - y[2 * j + 1];
                    const double v = 1.0 / (1.0 + dx * dx + dy * dy);
                    num[i * n + j] = num[j * n + i] = v;
                    s += 2.0 * v;
                }
            kl_trace->push_back(kl_divergence(p, num, s, n));
        }
    }

    std::vector<Point2> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {y[2 * i], y[2 * i + 1]};
    return out;
}

std::vector<Point2> pca_2d(const Matrix& data) {
    const std::size_t n = data.rows;
    const std::size_t dim = data.cols;
    if (n < 2)
        throw ParameterError("PCA needs at least 2 points");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> raw(data.values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    Eigen::MatrixXd centered = raw.rowwise() - raw.colwise().mean();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), 2);
    const Eigen::Index k = std::min<Eigen::Index>(2, svd.matrixV().cols());
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::VectorXd v = svd.matrixV().col(c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0)
            v = -v;
        axes.col(c) = v;
    }
    Eigen::MatrixXd proj = centered * axes;
    std::vector<Point2> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {proj(static_cast<Eigen::Index>(i), 0), proj(static_cast<Eigen::Index>(i), 1)};
    return out;
}

Projection2D project_2d(const EmbeddingModel& model, const Vocab& entities, const std::vector<std::string>& which,
                        ProjectionMethod method, const TsneParams& params, const KnowledgeGraph* kg) {
    if (entities.size() != model.entity_count())
        throw ValidationError("entity vocabulary does not match the model");
    if (kg && !(kg->entities() == entities))
        throw ValidationError("graph vocabulary does not match the model");

    std::vector<EntityId> ids;
    if (which.empty()) {
        for (EntityId e = 0; e < entities.size(); ++e)
            ids.push_back(e);
    } else {
        for (const auto& label : which) {
            auto id = entities.find(label);
            if (!id)
                throw ValidationError("unknown entity '" + label + "'");
            ids.push_back(*id);
        }
    }

    Matrix m{ids.size(), model.dim(), {}};
    m.values.reserve(ids.size() * model.dim());
    for (EntityId e : ids) {
        auto v = model.entity(e);
        m.values.insert(m.values.end(), v.begin(), v.end());
    }
    const auto coords = method == ProjectionMethod::TSNE ? tsne(m, params) : pca_2d(m);

    Projection2D out;
    out.method = method;
    out.params = params;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ProjectedPoint pt;
        pt.label = entities.label(ids[i]);
        pt.x = coords[i][0];
        pt.y = coords[i][1];
        if (kg && !kg->types_of(ids[i]).empty())
            pt.class_label = entities.label(kg->types_of(ids[i]).front());
        out.points.push_back(std::move(pt));
    }
    return out;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string projection_to_csv(const Projection2D& p) {
    std::string out = "label,x,y,class\n";
    for (const auto& pt : p.points)
        out += csv_field(pt.label) + "," + num(pt.x) + "," + num(pt.y) + "," + csv_field(pt.class_label) + "\n";
    return out;
}

std::string projection_to_svg(const Projection2D& p) {
    static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    constexpr double kSize = 800.0, kPad = 40.0, kLegend = 220.0;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!p.points.empty()) {
        xmin = xmax = p.points.front().x;
        ymin = ymax = p.points.front().y;
        for (const auto& pt : p.points) {
            xmin = std::min(xmin, pt.x);
            xmax = std::max(xmax, pt.x);
            ymin = std::min(ymin, pt.y);
            ymax = std::max(ymax, pt.y);
        }
    }
    const double xs = xmax > xmin ? (kSize - 2 * kPad) / (xmax - xmin) : 1.0;
    const double ys = ymax > ymin ? (kSize - 2 * kPad) / (ymax - ymin) : 1.0;

    std::map<std::string, std::string> colors;
    for (const auto& pt : p.points)
        colors.emplace(pt.class_label, "");
    std::size_t ci = 0;
    for (auto& [cls, color] : colors)
        color = kPalette[ci++ % std::size(kPalette)];

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + kLegend << "\" height=\"" << kSize
       << "\" viewBox=\"0 0 " << kSize + kLegend << ' ' << kSize << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kPad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << to_string(p.method)
       << " projection (" << p.points.size() << " points)</text>\n";
    for (const auto& pt : p.points) {
        const double cx = kPad + (pt.x - xmin) * xs;
        const double cy = kSize - kPad - (pt.y - ymin) * ys;
        os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"3\" fill=\"" << colors[pt.class_label]
           << "\"><title>" << xml_escape(pt.label) << "</title></circle>\n";
    }
    double ly = kPad;
    for (const auto& [cls, color] : colors) {
        os << "<circle cx=\"" << kSize + 10 << "\" cy=\"" << ly << "\" r=\"5\" fill=\"" << color << "\"/>";
        os << "<text x=\"" << kSize + 22 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
           << xml_escape(cls.empty() ? "(untyped)" : cls) << "</text>\n";
        ly += 18;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace skge
