// SPDX-License-Identifier: Apache-2.0
#include "wsngain/gains.hpp"

#include <cmath>
#include <numbers>

#include "wsngain/error.hpp"

namespace wsngain {

namespace {

int parse_positive_int(const std::string& s, const std::string& full)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw Error(ErrorCode::ParseError, "bad integer in constraint '" + full + "'");
    return v;
}

}  // namespace

ConstraintSpec parse_constraint(const std::string& text)
{
    if (text == "energy")
        return FixedEnergy{};
    if (text == "phase")
        return PhaseOnly{};
    if (text.rfind("quant:", 0) == 0)
        return QuantizedPhase{parse_positive_int(text.substr(6), text)};
    if (text.rfind("select:", 0) == 0) {
        std::string rest = text.substr(7);
        SensorSelect sel;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            std::string mode = rest.substr(colon + 1);
            if (mode == "phase")
                sel.mode = SensorSelect::Mode::Phase;
            else if (mode != "energy")
                throw Error(ErrorCode::ParseError, "unknown selection mode '" + mode + "'");
            rest = rest.substr(0, colon);
        }
        sel.active = parse_positive_int(rest, text);
        return sel;
    }
    throw Error(ErrorCode::ParseError, "unknown constraint '" + text + "'");
}

std::string to_string(const ConstraintSpec& c)
{
    struct Visitor {
        std::string operator()(const FixedEnergy&) const { return "energy"; }
        std::string operator()(const PhaseOnly&) const { return "phase"; }
        std::string operator()(const QuantizedPhase& q) const
        {
            return "quant:" + std::to_string(q.levels);
        }
        std::string operator()(const SensorSelect& s) const
        {
            return "select:" + std::to_string(s.active) +
                   (s.mode == SensorSelect::Mode::Phase ? ":phase" : "");
        }
    };
    return std::visit(Visitor{}, c);
}

void validate_constraint(const ConstraintSpec& c, int num_sensors)
{
    if (num_sensors < 1)
        throw Error(ErrorCode::InvalidConfig, "need at least one sensor");
    if (auto q = std::get_if<QuantizedPhase>(&c); q && q->levels < 2)
        throw Error(ErrorCode::InvalidConfig, "quantized phase needs Q >= 2");
    if (auto s = std::get_if<SensorSelect>(&c); s && (s->active < 1 || s->active >= num_sensors))
        throw Error(ErrorCode::InvalidConfig, "sensor selection needs 1 <= K < N");
}

bool satisfies(const CVector& a, const ConstraintSpec& c, double tol)
{
    const double n = static_cast<double>(a.size());
    if (std::holds_alternative<FixedEnergy>(c))
        return std::abs(a.squaredNorm() - n) <= tol * n;
    if (std::holds_alternative<PhaseOnly>(c))
        return ((a.array().abs() - 1.0).abs() <= tol).all();
    if (auto q = std::get_if<QuantizedPhase>(&c)) {
        const double step = 2.0 * std::numbers::pi / q->levels;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (std::abs(std::abs(a(i)) - 1.0) > tol)
                return false;
            double k = std::arg(a(i)) / step;
            if (std::abs(k - std::round(k)) * step > tol)
                return false;
        }
        return true;
    }
    const auto& s = std::get<SensorSelect>(c);
    int nonzero = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) != cdouble(0.0))
            ++nonzero;
    if (nonzero > s.active)
        return false;
    if (s.mode == SensorSelect::Mode::Energy)
        return std::abs(a.squaredNorm() - n) <= tol * n;
    const double modulus = std::sqrt(n / s.active);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) != cdouble(0.0) && std::abs(std::abs(a(i)) - modulus) > tol * modulus)
            return false;
    return true;
}

}  // namespace wsngain
