#include "thinlab/radius.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "thinlab/util.hpp"

namespace thinlab {

struct RadiusFunction::Impl {
  Kind kind;
  double param = 0.0;                // exponent or constant value
  std::vector<double> tab_t, tab_v;  // Tabulated
  std::shared_ptr<const Impl> base;  // Scaled
  double value_scale = 1.0, arg_scale = 1.0;

  double eval(double t) const {
    if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("RadiusFunction: argument must be finite and >= 0");
    switch (kind) {
      case Kind::Constant:
        return param;
      case Kind::PowerLaw:
      case Kind::CompactCutoff:
        return t <= 1.0 ? 1.0 : std::pow(t, -param);
      case Kind::Tabulated: {
        if (t <= tab_t.front()) return tab_v.front();
        if (t >= tab_t.back()) return tab_v.back();
        const auto it = std::upper_bound(tab_t.begin(), tab_t.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - tab_t.begin());
        const double t0 = tab_t[i - 1], t1 = tab_t[i];
        const double w = (t - t0) / (t1 - t0);
        return tab_v[i - 1] * (1.0 - w) + tab_v[i] * w;
      }
      case Kind::Scaled:
        return value_scale * base->eval(t / arg_scale);
    }
    throw std::logic_error("RadiusFunction: bad kind");
  }
};

static void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

RadiusFunction RadiusFunction::power_law(double exponent) {
  require_positive(exponent, "power_law exponent");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::PowerLaw;
  impl->param = exponent;
  return RadiusFunction(impl);
}

RadiusFunction RadiusFunction::constant(double value) {
  require_positive(value, "constant value");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Constant;
  impl->param = value;
  return RadiusFunction(impl);
}

RadiusFunction RadiusFunction::compact_cutoff(double exponent) {
  require_positive(exponent, "compact_cutoff exponent");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::CompactCutoff;
  impl->param = exponent;
  return RadiusFunction(impl);
}

RadiusFunction RadiusFunction::tabulated(std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2) throw std::invalid_argument("tabulated: need >= 2 matching samples");
  if (!std::is_sorted(t.begin(), t.end())) throw std::invalid_argument("tabulated: abscissae must be sorted");
  if (t.front() < 0.0) throw std::invalid_argument("tabulated: abscissae must be >= 0");
  // clamp monotone: running minimum keeps continuity and non-increase
  double run = v.front();
  for (auto& x : v) {
    require_positive(x, "tabulated value");
    run = std::min(run, x);
    x = run;
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Tabulated;
  impl->tab_t = std::move(t);
  impl->tab_v = std::move(v);
  return RadiusFunction(impl);
}

double RadiusFunction::operator()(double t) const { return impl_->eval(t); }

RadiusFunction RadiusFunction::scaled(double value_scale, double arg_scale) const {
  require_positive(value_scale, "value_scale");
  require_positive(arg_scale, "arg_scale");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Scaled;
  if (impl_->kind == Kind::Scaled) {  // collapse nesting so inverse scalings cancel cleanly
    impl->base = impl_->base;
    impl->value_scale = impl_->value_scale * value_scale;
    impl->arg_scale = impl_->arg_scale * arg_scale;
  } else {
    impl->base = impl_;
    impl->value_scale = value_scale;
    impl->arg_scale = arg_scale;
  }
  return RadiusFunction(impl);
}

RadiusFunction::Kind RadiusFunction::kind() const { return impl_->kind; }

std::string RadiusFunction::describe() const {
  char buf[96];
  switch (impl_->kind) {
    case Kind::PowerLaw:
      std::snprintf(buf, sizeof buf, "powerlaw:a=%g", impl_->param);
      return buf;
    case Kind::Constant:
      std::snprintf(buf, sizeof buf, "constant:c=%g", impl_->param);
      return buf;
    case Kind::CompactCutoff:
      std::snprintf(buf, sizeof buf, "cutoff:n=%g", impl_->param);
      return buf;
    case Kind::Tabulated:
      std::snprintf(buf, sizeof buf, "table:%zupts", impl_->tab_t.size());
      return buf;
    case Kind::Scaled: {
      std::snprintf(buf, sizeof buf, "scaled:v=%g,t=%g|", impl_->value_scale, impl_->arg_scale);
      return buf + RadiusFunction(impl_->base).describe();
    }
  }
  return "?";
}

RadiusFunction RadiusFunction::parse(const std::string& text) {
  auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument("cannot parse radius function: '" + text +
                                 "' (expected powerlaw:a=A | constant:c=C | cutoff:n=N | table:t0:v0,t1:v1,...)");
  };
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto num_after = [&](const char* key) {
    const std::string k = std::string(key) + "=";
    if (rest.rfind(k, 0) != 0) throw bad();
    std::size_t pos = 0;
    const double v = std::stod(rest.substr(k.size()), &pos);
    return v;
  };
  if (head == "powerlaw") return power_law(num_after("a"));
  if (head == "constant") return constant(num_after("c"));
  if (head == "cutoff") return compact_cutoff(num_after("n"));
  if (head == "table") {
    std::vector<double> ts, vs;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto c = item.find(':');
      if (c == std::string::npos) throw bad();
      ts.push_back(std::stod(item.substr(0, c)));
      vs.push_back(std::stod(item.substr(c + 1)));
    }
    if (ts.empty()) throw bad();
    return tabulated(std::move(ts), std::move(vs));
  }
  throw bad();
}

std::string CompatiblePair::describe() const {
  return rho1.describe() + "|" + rho2.describe() + "|C1=" + fmt_double(c1) + "|C2=" + fmt_double(c2);
}

CompatibilityReport check_compatibility(const CompatiblePair& pair, double t_max, int probes) {
  if (!(t_max > 0.0) || probes < 2) throw std::invalid_argument("check_compatibility: need t_max > 0, probes >= 2");
  require_positive(pair.c1, "c1");
  require_positive(pair.c2, "c2");
  // log grid cannot contain 0, so 0 is adjoined explicitly
  std::vector<double> ts{0.0};
  const double lo = std::min(1e-6, t_max * 0.5);
  for (double t : log_spaced(lo, t_max, probes - 1)) ts.push_back(t);

  CompatibilityReport rep;
  rep.t_max = t_max;
  rep.probes = static_cast<int>(ts.size());
  rep.holds = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double r1 = pair.rho1(t);
    if (!std::isfinite(r1) || r1 <= 0.0)
      throw std::runtime_error("check_compatibility: rho1 not finite-positive at t=" + fmt_double(t));
    const double inner = pair.c1 / r1;
    const double r2 = pair.rho2(inner);
    if (!std::isfinite(r2) || r2 <= 0.0)
      throw std::runtime_error("check_compatibility: rho2 not finite-positive at t=" + fmt_double(inner));
    const double margin = pair.c2 / r2 - t;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_t = t;
    }
    // threshold pairs meet the condition with equality, so the round trip
    // through pow can land a few ulps below t; only count real violations
    if (margin < -1e-12 * std::max(1.0, t)) rep.holds = false;
  }
  return rep;
}

CompatiblePair scale_pair(const CompatiblePair& pair, double k) {
  require_positive(k, "scale factor k");
  CompatiblePair out = pair;
  out.rho1 = pair.rho1.scaled(k, k);            // k * rho1(t/k)
  out.rho2 = pair.rho2.scaled(1.0 / k, 1.0 / k);  // (1/k) * rho2(k t)
  out.certified = false;  // re-certify on the caller's probe grid
  return out;
}

CompatiblePair parse_pair(const std::string& name) {
  if (name == "wolff")
    return {RadiusFunction::power_law(1.0), RadiusFunction::power_law(1.0), 1.0, 1.0};
  if (name == "incompat")
    return {RadiusFunction::power_law(1.0), RadiusFunction::power_law(0.5), 1.0, 1.0};
  if (name.rfind("powerlaw:a=", 0) == 0) {
    const double a = std::stod(name.substr(11));
    require_positive(a, "pair exponent a");
    return {RadiusFunction::power_law(a), RadiusFunction::power_law(1.0 / a), 1.0, 1.0};
  }
  if (name.rfind("ls:n=", 0) == 0) {
    const double n = std::stod(name.substr(5));
    require_positive(n, "pair parameter n");
    return {RadiusFunction::power_law(1.0 / n), RadiusFunction::power_law(n), 1.0, 1.0};
  }
  if (name.rfind("cutoff:n=", 0) == 0) {
    const double n = std::stod(name.substr(9));
    require_positive(n, "pair parameter n");
    return {RadiusFunction::compact_cutoff(n), RadiusFunction::compact_cutoff(n), 1.0, 1.0};
  }
  throw std::invalid_argument("unknown pair preset: '" + name +
                              "' (expected wolff | powerlaw:a=A | ls:n=N | cutoff:n=N | incompat)");
}

}  // namespace thinlab
