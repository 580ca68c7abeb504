#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "mink/congruence.hpp"
#include "mink/darboux.hpp"
#include "mink/errors.hpp"
#include "mink/penrose.hpp"
#include "mink/trace_csv.hpp"

namespace mink {

enum class SvgView { Plane, Penrose };

namespace detail {

struct WorldRect {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// Liang-Barsky segment clip against a world rectangle.
inline bool clip_segment(SplitComplex& a, SplitComplex& b, const WorldRect& r) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.re - a.re, dy = b.im - a.im;
    auto pass = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        const double u = q / p;
        if (p < 0.0) {
            if (u > t1) return false;
            if (u > t0) t0 = u;
        } else {
            if (u < t0) return false;
            if (u < t1) t1 = u;
        }
        return true;
    };
    if (!pass(-dx, a.re - r.x0) || !pass(dx, r.x1 - a.re) || !pass(-dy, a.im - r.y0) ||
        !pass(dy, r.y1 - a.im)) {
        return false;
    }
    const SplitComplex na{a.re + t0 * dx, a.im + t0 * dy};
    const SplitComplex nb{a.re + t1 * dx, a.im + t1 * dy};
    a = na;
    b = nb;
    return true;
}

class SvgCanvas {
public:
    SvgCanvas(WorldRect world, double px, double margin)
        : world_(world), px_(px), margin_(margin) {
        const double usable = px - 2 * margin;
        scale_ = std::min(usable / world.width(), usable / world.height());
        cx_ = 0.5 * (world.x0 + world.x1);
        cy_ = 0.5 * (world.y0 + world.y1);
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 ";
        append_double(body_, px);
        body_ += " ";
        append_double(body_, px);
        body_ += "\">\n";
    }

    double sx(double wx) const { return 0.5 * px_ + (wx - cx_) * scale_; }
    double sy(double wy) const { return 0.5 * px_ - (wy - cy_) * scale_; }

    void polyline(const std::vector<SplitComplex>& pts, const char* stroke, double width,
                  const char* dash = nullptr) {
        if (pts.size() < 2) return;
        std::string d;
        bool pen_down = false;
        SplitComplex last{};
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            SplitComplex a = pts[i], b = pts[i + 1];
            if (!clip_segment(a, b, world_)) {
                pen_down = false;
                continue;
            }
            if (!pen_down || a.re != last.re || a.im != last.im) {
                d += "M";
                point(d, a);
            }
            d += "L";
            point(d, b);
            pen_down = true;
            last = b;
        }
        if (d.empty()) return;
        body_ += "<path fill=\"none\" stroke=\"";
        body_ += stroke;
        body_ += "\" stroke-width=\"";
        append_double(body_, width);
        body_ += "\"";
        if (dash) {
            body_ += " stroke-dasharray=\"";
            body_ += dash;
            body_ += "\"";
        }
        body_ += " d=\"" + d + "\"/>\n";
    }

    void dot(const SplitComplex& w, double r, const char* fill) {
        if (w.re < world_.x0 || w.re > world_.x1 || w.im < world_.y0 || w.im > world_.y1) return;
        body_ += "<circle cx=\"";
        append_double(body_, sx(w.re));
        body_ += "\" cy=\"";
        append_double(body_, sy(w.im));
        body_ += "\" r=\"";
        append_double(body_, r);
        body_ += "\" fill=\"";
        body_ += fill;
        body_ += "\"/>\n";
    }

    void text(const SplitComplex& w, const char* s, double dx, double dy) {
        body_ += "<text x=\"";
        append_double(body_, sx(w.re) + dx);
        body_ += "\" y=\"";
        append_double(body_, sy(w.im) + dy);
        body_ += "\" font-family=\"sans-serif\" font-size=\"18\" fill=\"#333\">";
        body_ += s;
        body_ += "</text>\n";
    }

    std::string finish() {
        body_ += "</svg>\n";
        return std::move(body_);
    }

private:
    void point(std::string& d, const SplitComplex& w) {
        append_double(d, sx(w.re));
        d += " ";
        append_double(d, sy(w.im));
        d += " ";
    }

    WorldRect world_;
    double px_, margin_, scale_, cx_, cy_;
    std::string body_;
};

// Finite xhat polylines split at the blow-up markers.
inline std::vector<std::vector<SplitComplex>> xhat_strands(const DarbouxSolution& sol, bool penrose) {
    std::vector<std::vector<SplitComplex>> strands(1);
    for (const Sample& s : sol.samples) {
        if (!s.xhat) {
            if (!strands.back().empty()) strands.emplace_back();
            continue;
        }
        strands.back().push_back(penrose ? [&] {
            const PenrosePoint p = penrose_map(*s.xhat);
            return SplitComplex{p.psi, p.zeta};
        }()
                                         : *s.xhat);
    }
    return strands;
}

inline const Sample* nearest_finite_sample(const DarbouxSolution& sol, double t) {
    const Sample* best = nullptr;
    double dist = 1e300;
    for (const Sample& s : sol.samples) {
        if (!s.xhat) continue;
        const double d = std::fabs(s.t - t);
        if (d < dist) {
            dist = d;
            best = &s;
        }
    }
    return best;
}

inline std::string render_plane_svg(const DarbouxSolution& sol, int congruence_stride) {
    // frame follows the base curve, expanded a bit; the transform is clipped
    WorldRect w{1e300, -1e300, 1e300, -1e300};
    for (const Sample& s : sol.samples) {
        w.x0 = std::min(w.x0, s.x.re);
        w.x1 = std::max(w.x1, s.x.re);
        w.y0 = std::min(w.y0, s.x.im);
        w.y1 = std::max(w.y1, s.x.im);
        if (s.xhat && euclid_norm2(*s.xhat) < 1e4) {
            w.x0 = std::min(w.x0, s.xhat->re);
            w.x1 = std::max(w.x1, s.xhat->re);
            w.y0 = std::min(w.y0, s.xhat->im);
            w.y1 = std::max(w.y1, s.xhat->im);
        }
    }
    const double span = std::max({w.width(), w.height(), 1.0});
    const double mx = 0.5 * (w.x0 + w.x1), my = 0.5 * (w.y0 + w.y1);
    w = {mx - 0.65 * span, mx + 0.65 * span, my - 0.65 * span, my + 0.65 * span};

    SvgCanvas canvas(w, 800.0, 30.0);

    // axes
    canvas.polyline({{w.x0, 0.0}, {w.x1, 0.0}}, "#cccccc", 1.0);
    canvas.polyline({{0.0, w.y0}, {0.0, w.y1}}, "#cccccc", 1.0);

    // sampled congruence circles (hyperbola branches through the pair)
    std::vector<const Sample*> finite;
    for (const Sample& s : sol.samples) {
        if (s.xhat) finite.push_back(&s);
    }
    const int stride = congruence_stride > 0
                           ? congruence_stride
                           : std::max<int>(1, static_cast<int>(finite.size()) / 14);
    for (std::size_t i = 0; i < finite.size(); i += stride) {
        const Sample& s = *finite[i];
        CircleCongruence cc;
        try {
            cc = congruence_at(s.x, sol.base.curve.derivative(s.t), *s.xhat);
        } catch (const Error&) {
            continue;
        }
        if (!cc.is_circle()) continue;
        const double r = std::fabs(cc.radius_xi);
        if (r < 1e-6 * span || r > 50 * span) continue;
        for (int branch = -1; branch <= 1; branch += 2) {
            std::vector<SplitComplex> pts;
            for (int k = 0; k <= 48; ++k) {
                const double u = -1.75 + 3.5 * k / 48.0;
                if (cc.kind == CongruenceKind::TimelikeCircle) {
                    pts.push_back(cc.center + SplitComplex{r * std::sinh(u), branch * r * std::cosh(u)});
                } else {
                    pts.push_back(cc.center + SplitComplex{branch * r * std::cosh(u), r * std::sinh(u)});
                }
            }
            canvas.polyline(pts, "#c9c9c9", 1.0);
        }
    }

    // base curve
    std::vector<SplitComplex> base;
    for (const Sample& s : sol.samples) base.push_back(s.x);
    canvas.polyline(base, "#1a1a1a", 2.0);

    // transform, split at blow-ups
    for (const auto& strand : xhat_strands(sol, false)) {
        canvas.polyline(strand, "#c0392b", 2.0);
    }

    // lightlike points of the base curve, marked on both images
    for (double tc : sol.lightlike_crossings) {
        if (const Sample* s = nearest_finite_sample(sol, tc)) {
            canvas.dot(s->x, 4.0, "#000000");
            if (s->xhat) canvas.dot(*s->xhat, 4.0, "#000000");
        }
    }
    return canvas.finish();
}

inline std::string render_penrose_svg(const DarbouxSolution& sol) {
    const double pi = std::numbers::pi;
    SvgCanvas canvas({-3.45, 3.45, -3.45, 3.45}, 800.0, 30.0);

    // diamond boundary |psi +- zeta| = pi and axes
    canvas.polyline({{0.0, pi}, {pi, 0.0}, {0.0, -pi}, {-pi, 0.0}, {0.0, pi}}, "#333333", 2.0);
    canvas.polyline({{-pi, 0.0}, {pi, 0.0}}, "#dddddd", 1.0);
    canvas.polyline({{0.0, -pi}, {0.0, pi}}, "#dddddd", 1.0);
    canvas.text({0.0, pi}, "I+", -8.0, -10.0);
    canvas.text({0.0, -pi}, "I-", -8.0, 24.0);
    canvas.text({pi, 0.0}, "I0", 8.0, 6.0);
    canvas.text({-pi, 0.0}, "I0", -30.0, 6.0);

    std::vector<SplitComplex> base;
    for (const Sample& s : sol.samples) {
        const PenrosePoint p = penrose_map(s.x);
        base.push_back({p.psi, p.zeta});
    }
    canvas.polyline(base, "#1a1a1a", 2.0);

    for (const auto& strand : xhat_strands(sol, true)) {
        canvas.polyline(strand, "#c0392b", 2.0);
    }

    // boundary points reached by blow-ups
    for (const BlowupEvent& ev : sol.events) {
        const PenrosePoint p = penrose_boundary_point(ev.infinity);
        canvas.dot({p.psi, p.zeta}, 5.0, "#c0392b");
    }

    for (double tc : sol.lightlike_crossings) {
        if (const Sample* s = nearest_finite_sample(sol, tc)) {
            if (s->xhat) {
                const PenrosePoint p = penrose_map(*s->xhat);
                canvas.dot({p.psi, p.zeta}, 4.0, "#000000");
            }
            const PenrosePoint p = penrose_map(s->x);
            canvas.dot({p.psi, p.zeta}, 4.0, "#000000");
        }
    }
    return canvas.finish();
}

}  // namespace detail

inline std::string render_svg(const DarbouxSolution& sol, SvgView view, int congruence_stride = 0) {
    return view == SvgView::Plane ? detail::render_plane_svg(sol, congruence_stride)
                                  : detail::render_penrose_svg(sol);
}

inline void emit_svg(const DarbouxSolution& sol, SvgView view, const std::string& path,
                     int congruence_stride = 0) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("emit_svg: cannot open '" + path + "'");
    f << render_svg(sol, view, congruence_stride);
    if (!f) throw IoError("emit_svg: write failed for '" + path + "'");
}

}  // namespace mink
