#include "loophole/core.hpp"

#include <sstream>
#include <stdexcept>

namespace loophole {

Scenario::Scenario(int m_a, int m_b, int n_a, int n_b)
    : mA(m_a), mB(m_b), nA(n_a), nB(n_b) {
    if (mA < 2 || mB < 2 || nA < 2 || nB < 2)
        throw std::invalid_argument("Scenario: all input/output counts must be >= 2");
}

Distribution::Distribution(Scenario scenario, std::vector<Rational> table)
    : scenario_(scenario), table_(std::move(table)) {
    if (table_.size() != scenario_.table_size())
        throw std::invalid_argument("Distribution: table length mismatch");
}

const Rational& Distribution::at(int x, int y, int a, int b) const {
    if (x < 0 || x >= scenario_.mA || y < 0 || y >= scenario_.mB ||
        a < 0 || a >= scenario_.nA || b < 0 || b >= scenario_.nB)
        throw std::out_of_range("Distribution: index out of range");
    return table_[scenario_.index(x, y, a, b)];
}

std::string NormalizationReport::describe() const {
    if (ok()) return "normalized";
    std::ostringstream os;
    os << "normalization violated at " << violations.size() << " input pair(s); first: (x="
       << violations.front().x << ", y=" << violations.front().y << ") sums to "
       << violations.front().sum.str();
    return os.str();
}

std::string NoSignallingReport::describe() const {
    if (ok) return "no-signalling";
    std::ostringstream os;
    if (party == 'A')
        os << "Alice's marginal p(a=" << output << "|x=" << input << ") depends on y: "
           << value_1.str() << " at y=" << other_input_1 << " vs " << value_2.str()
           << " at y=" << other_input_2;
    else
        os << "Bob's marginal p(b=" << output << "|y=" << input << ") depends on x: "
           << value_1.str() << " at x=" << other_input_1 << " vs " << value_2.str()
           << " at x=" << other_input_2;
    return os.str();
}

NormalizationReport validate_normalization(const Distribution& p) {
    const Scenario& sc = p.scenario();
    NormalizationReport report;
    for (int x = 0; x < sc.mA; ++x)
        for (int y = 0; y < sc.mB; ++y) {
            Rational sum;
            for (int a = 0; a < sc.nA; ++a)
                for (int b = 0; b < sc.nB; ++b) sum += p(x, y, a, b);
            if (sum != Rational(1)) report.violations.push_back({x, y, sum});
        }
    return report;
}

NoSignallingReport validate_no_signalling(const Distribution& p) {
    const Scenario& sc = p.scenario();
    NoSignallingReport report;
    // Alice's marginal must not depend on Bob's input choice.
    for (int x = 0; x < sc.mA; ++x)
        for (int a = 0; a < sc.nA; ++a) {
            Rational ref;
            for (int b = 0; b < sc.nB; ++b) ref += p(x, 0, a, b);
            for (int y = 1; y < sc.mB; ++y) {
                Rational m;
                for (int b = 0; b < sc.nB; ++b) m += p(x, y, a, b);
                if (m != ref) {
                    report.ok = false;
                    report.party = 'A';
                    report.output = a;
                    report.input = x;
                    report.other_input_1 = 0;
                    report.other_input_2 = y;
                    report.value_1 = ref;
                    report.value_2 = m;
                    return report;
                }
            }
        }
    // Bob's marginal must not depend on Alice's input choice.
    for (int y = 0; y < sc.mB; ++y)
        for (int b = 0; b < sc.nB; ++b) {
            Rational ref;
            for (int a = 0; a < sc.nA; ++a) ref += p(0, y, a, b);
            for (int x = 1; x < sc.mA; ++x) {
                Rational m;
                for (int a = 0; a < sc.nA; ++a) m += p(x, y, a, b);
                if (m != ref) {
                    report.ok = false;
                    report.party = 'B';
                    report.output = b;
                    report.input = y;
                    report.other_input_1 = 0;
                    report.other_input_2 = x;
                    report.value_1 = ref;
                    report.value_2 = m;
                    return report;
                }
            }
        }
    return report;
}

void require_valid(const Distribution& p, const char* where) {
    static const Rational zero(0), one(1);
    for (const Rational& v : p.table())
        if (v < zero || v > one)
            throw std::invalid_argument(std::string(where) + ": entry outside [0, 1]");
    if (auto norm = validate_normalization(p); !norm.ok())
        throw std::invalid_argument(std::string(where) + ": " + norm.describe());
    if (auto ns = validate_no_signalling(p); !ns.ok)
        throw std::invalid_argument(std::string(where) + ": " + ns.describe());
}

Rational marginal_a(const Distribution& p, int a, int x) {
    const Scenario& sc = p.scenario();
    if (a < 0 || a >= sc.nA || x < 0 || x >= sc.mA)
        throw std::out_of_range("marginal_a: index out of range");
    Rational sum;
    for (int b = 0; b < sc.nB; ++b) sum += p(x, 0, a, b);
    return sum;
}

Rational marginal_b(const Distribution& p, int b, int y) {
    const Scenario& sc = p.scenario();
    if (b < 0 || b >= sc.nB || y < 0 || y >= sc.mB)
        throw std::out_of_range("marginal_b: index out of range");
    Rational sum;
    for (int a = 0; a < sc.nA; ++a) sum += p(0, y, a, b);
    return sum;
}

std::vector<Rational> to_vector(const Distribution& p) {
    return {p.table().begin(), p.table().end()};
}

Distribution from_vector(const Scenario& scenario, std::vector<Rational> table) {
    return Distribution(scenario, std::move(table));
}

Distribution convex_combine(const std::vector<std::pair<Rational, Distribution>>& terms) {
    if (terms.empty()) throw std::invalid_argument("convex_combine: no terms");
    const Scenario& sc = terms.front().second.scenario();
    Rational total;
    for (const auto& [w, d] : terms) {
        if (w.sign() < 0) throw std::invalid_argument("convex_combine: negative weight");
        if (!(d.scenario() == sc)) throw std::invalid_argument("convex_combine: scenario mismatch");
        total += w;
    }
    if (total != Rational(1)) throw std::invalid_argument("convex_combine: weights must sum to 1");
    std::vector<Rational> out(sc.table_size());
    for (const auto& [w, d] : terms) {
        auto t = d.table();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * t[i];
    }
    return Distribution(sc, std::move(out));
}

}  // namespace loophole
