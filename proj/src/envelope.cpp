#include <algorithm>
#include <cmath>
#include <cstdio>

#include "povmrand/certify.hpp"

namespace povmrand {

ConvexEnvelope::ConvexEnvelope(std::vector<std::pair<double, double>> samples) {
    std::sort(samples.begin(), samples.end());
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : samples) {
        if (!std::isfinite(s.first) || !std::isfinite(s.second)) throw InputError("envelope sample is not finite");
        if (!pts.empty() && pts.back().first == s.first) throw InputError("envelope samples need distinct q");
        pts.push_back(s);
    }
    if (pts.size() < 2) throw InputError("envelope needs at least two samples");
    // Monotone chain, lower hull: drop the middle point unless it lies strictly below the chord.
    for (const auto& p : pts) {
        while (hull_.size() >= 2) {
            const auto& o = hull_[hull_.size() - 2];
            const auto& a = hull_.back();
            const double cross = (a.first - o.first) * (p.second - o.second) - (a.second - o.second) * (p.first - o.first);
            if (cross <= 0) hull_.pop_back();
            else break;
        }
        hull_.push_back(p);
    }
}

double ConvexEnvelope::operator()(double q) const {
    if (hull_.empty()) throw InputError("empty envelope");
    const double tol = 1e-12 * std::max(1.0, std::abs(q));
    if (q < lo() - tol || q > hi() + tol) throw InputError("envelope evaluation outside the sampled range");
    if (q <= lo()) return hull_.front().second;
    if (q >= hi()) return hull_.back().second;
    auto it = std::upper_bound(hull_.begin(), hull_.end(), q,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double t = (q - a.first) / (b.first - a.first);
    return a.second + t * (b.second - a.second);
}

// The envelope is taken over min-entropy, which is what the adversary's mixing convexifies.
void GuessingCurve::rebuildEnvelope() {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : samples)
        if (s.ok) pts.emplace_back(s.q, minEntropy(std::clamp(s.p, 1e-300, 1.0)));
    envelope = ConvexEnvelope(std::move(pts));
}

std::string GuessingCurve::csv(const std::string& headerComment) const {
    std::string out;
    if (!headerComment.empty()) out += "# " + headerComment + "\n";
    out += "q,pguess,min_entropy_bits,level,strategy_id\n";
    char buf[160];
    for (const auto& s : samples) {
        if (!s.ok) continue;
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,", s.q, s.p, minEntropy(std::clamp(s.p, 1e-300, 1.0)));
        out += buf;
        out += s.level + "," + std::to_string(s.strategy) + "\n";
    }
    return out;
}

std::vector<double> certificateGrid(const Certificate& cert, int points) {
    if (points < 2) throw InputError("a grid needs at least two points");
    const double lo = cert.localBound.value_or(cert.whiteNoise);
    const double hi = cert.quantumBound;
    if (!(hi > lo)) throw InputError("certificate range is empty");
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1));
    return g;
}

}  // namespace povmrand
