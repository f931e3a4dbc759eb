#include "frw/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <string_view>

#include "frw/errors.hpp"

namespace frw {

using nlohmann::json;

double FriedmannConfig::effective_G() const {
  return units == Units::ReducedPlanck ? friedmann::reduced_planck_G() : G;
}

std::string Scenario::model_name() const {
  switch (model.index()) {
    case 0: return "flow";
    case 1: return "friedmann";
    default: return "bransdicke";
  }
}

std::vector<double> Scenario::output_grid() const {
  if (output_points == 0) return {};
  return ode::uniform_grid({0.0, t_end}, output_points);
}

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Typed access to one JSON object with the dotted path of every field kept
// for error messages.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : j_.items()) {
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known) throw ValidationError(join(path_, key), "unknown field");
    }
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  double number(std::string_view key) const {
    const json& v = require(key);
    if (!v.is_number()) throw ValidationError(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(field(key), "must be finite");
    return x;
  }

  double number(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::string string(std::string_view key) const {
    const json& v = require(key);
    if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::size_t count(std::string_view key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(std::string(key));
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(field(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::vector<double> numbers(std::string_view key) const {
    if (!has(key)) return {};
    const json& v = j_.at(std::string(key));
    if (!v.is_array()) throw ValidationError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw ValidationError(field(key), "expected an array of finite numbers");
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  Reader child(std::string_view key) const { return Reader(require(key), field(key)); }

  const json& raw(std::string_view key) const { return require(key); }
  std::string field(std::string_view key) const { return join(path_, key); }

 private:
  const json& require(std::string_view key) const {
    if (!j_.contains(std::string(key))) throw ValidationError(field(key), "missing required field");
    return j_.at(std::string(key));
  }

  const json& j_;
  std::string path_;
};

flow::FormulationKind parse_formulation(const Reader& r) {
  const std::string s = r.string("formulation");
  for (auto k : {flow::FormulationKind::Direct, flow::FormulationKind::Hubble,
                 flow::FormulationKind::Chi, flow::FormulationKind::Intrinsic}) {
    if (s == flow::to_string(k)) return k;
  }
  throw ValidationError(r.field("formulation"), "expected direct, hubble, chi or intrinsic");
}

std::optional<flow::Sigma> parse_sigma(const Reader& r) {
  if (!r.has("sigma")) return std::nullopt;
  const json& v = r.raw("sigma");
  if (v.is_string() && v.get<std::string>() == "calibrated") return std::nullopt;
  if (v.is_number_integer()) {
    if (v.get<int>() == -1) return flow::Sigma::Minus;
    if (v.get<int>() == 1) return flow::Sigma::Plus;
  }
  throw ValidationError(r.field("sigma"), "expected \"calibrated\", -1 or 1");
}

FlowConfig parse_flow(const Reader& r) {
  r.allow({"formulation", "sigma", "initial"});
  FlowConfig c;
  c.formulation = parse_formulation(r);
  c.sigma = parse_sigma(r);
  const Reader init = r.child("initial");
  init.allow({"a", "a_dot"});
  c.a0 = init.number("a");
  c.a_dot0 = init.number("a_dot", 0.0);
  return c;
}

FriedmannConfig parse_friedmann(const Reader& r) {
  r.allow({"units", "G", "Lambda", "fluids", "density", "initial"});
  FriedmannConfig c;
  if (r.has("units")) {
    const std::string u = r.string("units");
    if (u == "geometric") {
      c.units = Units::Geometric;
    } else if (u == "reduced_planck") {
      c.units = Units::ReducedPlanck;
    } else {
      throw ValidationError(r.field("units"), "expected geometric or reduced_planck");
    }
  }
  if (c.units == Units::ReducedPlanck && r.has("G")) {
    throw ValidationError(r.field("G"), "G is fixed by reduced_planck units");
  }
  c.G = r.number("G", 1.0);
  c.Lambda = r.number("Lambda", 0.0);
  if (r.has("fluids")) {
    const json& arr = r.raw("fluids");
    if (!arr.is_array()) throw ValidationError(r.field("fluids"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Reader f(arr[i], r.field("fluids") + "[" + std::to_string(i) + "]");
      f.allow({"w", "rho0"});
      c.fluids.push_back({f.number("w"), f.number("rho0")});
    }
  }
  if (r.has("density")) {
    const std::string d = r.string("density");
    if (d == "evolve") {
      c.density = friedmann::DensityMode::Evolve;
    } else if (d == "closed_form") {
      c.density = friedmann::DensityMode::ClosedForm;
    } else {
      throw ValidationError(r.field("density"), "expected evolve or closed_form");
    }
  }
  const Reader init = r.child("initial");
  init.allow({"a", "a_dot_sign"});
  c.a0 = init.number("a");
  const double sign = init.number("a_dot_sign", 1.0);
  if (sign != 1.0 && sign != -1.0) {
    throw ValidationError(init.field("a_dot_sign"), "expected 1 or -1");
  }
  c.a_dot_sign = static_cast<int>(sign);
  return c;
}

BransDickeConfig parse_bransdicke(const Reader& r) {
  r.allow({"coupling", "V", "matter", "initial", "complete"});
  BransDickeConfig c;
  c.params.coupling = r.number("coupling");
  c.params.V.coeffs = r.numbers("V");

  const Reader m = r.child("matter");
  const std::string type = m.string("type");
  if (type == "fluid") {
    m.allow({"type", "w"});
    c.params.matter = bd::FluidMatter{m.number("w", 0.0)};
  } else if (type == "inflaton") {
    m.allow({"type", "U"});
    c.params.matter = bd::InflatonMatter{bd::Polynomial{m.numbers("U")}};
  } else {
    throw ValidationError(m.field("type"), "expected fluid or inflaton");
  }

  const Reader init = r.child("initial");
  init.allow({"a", "H", "phi", "phi_dot", "rho", "psi", "psi_dot"});
  c.initial.a = init.number("a");
  c.initial.H = init.number("H", 0.0);
  c.initial.phi = init.number("phi");
  c.initial.phi_dot = init.number("phi_dot", 0.0);
  c.initial.rho = init.number("rho", 0.0);
  if (c.params.is_inflaton()) {
    if (init.has("rho")) {
      throw ValidationError(init.field("rho"), "inflaton density follows from psi and psi_dot");
    }
    c.initial.field = bd::InflatonField{init.number("psi"), init.number("psi_dot", 0.0)};
  } else if (init.has("psi") || init.has("psi_dot")) {
    throw ValidationError(init.field(init.has("psi") ? "psi" : "psi_dot"),
                          "only meaningful for inflaton matter");
  }

  const std::string complete =
      r.has("complete") ? r.string("complete") : (c.params.is_inflaton() ? "H" : "rho");
  if (complete == "none") {
    c.completion = std::nullopt;
  } else {
    bool found = false;
    for (auto k : {bd::Completion::Rho, bd::Completion::Hubble, bd::Completion::PsiDot}) {
      if (complete == bd::to_string(k)) {
        c.completion = k;
        found = true;
      }
    }
    if (!found) throw ValidationError(r.field("complete"), "expected rho, H, psi_dot or none");
  }
  return c;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  const Reader root(j, "");
  root.allow({"spec_version", "model", "kappa", "span", "output", "integrator", "guard", "flow",
              "friedmann", "bransdicke"});
  Scenario s;
  const json& version = root.raw("spec_version");
  if (!version.is_number_integer() || version.get<int>() != kScenarioVersion) {
    throw ValidationError("spec_version", "unsupported version (expected 1)");
  }
  const std::string model = root.string("model");
  for (std::string_view other : {"flow", "friedmann", "bransdicke"}) {
    if (other != model && root.has(other)) {
      throw ValidationError(std::string(other), "section does not match model '" + model + "'");
    }
  }
  s.kappa = root.number("kappa", 0.0);

  const Reader span = root.child("span");
  span.allow({"t_end"});
  s.t_end = span.number("t_end");

  if (root.has("output")) {
    const Reader out = root.child("output");
    out.allow({"points"});
    s.output_points = out.count("points", s.output_points);
  }
  if (root.has("integrator")) {
    const Reader in = root.child("integrator");
    in.allow({"abs_tol", "rel_tol", "h_init", "h_min", "h_max", "max_steps"});
    auto& st = s.integrator;
    st.abs_tol = in.number("abs_tol", st.abs_tol);
    st.rel_tol = in.number("rel_tol", st.rel_tol);
    st.h_init = in.number("h_init", st.h_init);
    st.h_min = in.number("h_min", st.h_min);
    st.h_max = in.number("h_max", st.h_max);
    st.max_steps = in.count("max_steps", st.max_steps);
  }
  if (root.has("guard")) {
    const Reader g = root.child("guard");
    g.allow({"eps_min", "a_max"});
    s.guard.eps_min = g.number("eps_min", s.guard.eps_min);
    s.guard.a_max = g.number("a_max", s.guard.a_max);
  }

  if (model == "flow") {
    s.model = parse_flow(root.child("flow"));
  } else if (model == "friedmann") {
    s.model = parse_friedmann(root.child("friedmann"));
  } else if (model == "bransdicke") {
    s.model = parse_bransdicke(root.child("bransdicke"));
  } else {
    throw ValidationError("model", "expected flow, friedmann or bransdicke");
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("<config>", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("<config>", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["spec_version"] = s.spec_version;
  j["model"] = s.model_name();
  j["kappa"] = s.kappa;
  j["span"] = {{"t_end", s.t_end}};
  j["output"] = {{"points", s.output_points}};
  const auto& st = s.integrator;
  j["integrator"] = {{"abs_tol", st.abs_tol}, {"rel_tol", st.rel_tol}, {"h_init", st.h_init},
                     {"h_min", st.h_min},     {"h_max", st.h_max},     {"max_steps", st.max_steps}};
  j["guard"] = {{"eps_min", s.guard.eps_min}, {"a_max", s.guard.a_max}};

  if (const auto* f = std::get_if<FlowConfig>(&s.model)) {
    json sec;
    sec["formulation"] = std::string(flow::to_string(f->formulation));
    if (f->sigma) {
      sec["sigma"] = static_cast<int>(*f->sigma);
    } else {
      sec["sigma"] = "calibrated";
    }
    sec["initial"] = {{"a", f->a0}, {"a_dot", f->a_dot0}};
    j["flow"] = sec;
  } else if (const auto* f = std::get_if<FriedmannConfig>(&s.model)) {
    json sec;
    if (f->units == Units::ReducedPlanck) {
      sec["units"] = "reduced_planck";
    } else {
      sec["units"] = "geometric";
      sec["G"] = f->G;
    }
    sec["Lambda"] = f->Lambda;
    sec["fluids"] = json::array();
    for (const auto& fl : f->fluids) sec["fluids"].push_back({{"w", fl.w}, {"rho0", fl.rho0}});
    sec["density"] = f->density == friedmann::DensityMode::Evolve ? "evolve" : "closed_form";
    sec["initial"] = {{"a", f->a0}, {"a_dot_sign", f->a_dot_sign}};
    j["friedmann"] = sec;
  } else {
    const auto& b = std::get<BransDickeConfig>(s.model);
    json sec;
    sec["coupling"] = b.params.coupling;
    sec["V"] = b.params.V.coeffs;
    if (const auto* fl = std::get_if<bd::FluidMatter>(&b.params.matter)) {
      sec["matter"] = {{"type", "fluid"}, {"w", fl->w}};
    } else {
      sec["matter"] = {{"type", "inflaton"},
                       {"U", std::get<bd::InflatonMatter>(b.params.matter).U.coeffs}};
    }
    json init = {{"a", b.initial.a},
                 {"H", b.initial.H},
                 {"phi", b.initial.phi},
                 {"phi_dot", b.initial.phi_dot}};
    if (b.initial.field) {
      init["psi"] = b.initial.field->psi;
      init["psi_dot"] = b.initial.field->psi_dot;
    } else {
      init["rho"] = b.initial.rho;
    }
    sec["initial"] = init;
    sec["complete"] = b.completion ? std::string(bd::to_string(*b.completion)) : "none";
    j["bransdicke"] = sec;
  }
  return j;
}

namespace {

void check_initial_scale(const Scenario& s, double a, const std::string& field) {
  if (!(a >= s.guard.eps_min && a <= s.guard.a_max)) {
    throw ValidationError(field, "initial scale factor must lie in [eps_min, a_max]");
  }
}

}  // namespace

void validate(const Scenario& s) {
  if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) {
    throw ValidationError("span.t_end", "must be finite and >= 0");
  }
  try {
    s.integrator.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError("integrator", e.what());
  }
  if (!(s.guard.eps_min > 0.0 && s.guard.eps_min < s.guard.a_max)) {
    throw ValidationError("guard", "need 0 < eps_min < a_max");
  }
  const geometry::SpatialCurvature kappa(s.kappa);

  if (const auto* f = std::get_if<FlowConfig>(&s.model)) {
    check_initial_scale(s, f->a0, "flow.initial.a");
    return;
  }

  if (const auto* f = std::get_if<FriedmannConfig>(&s.model)) {
    if (!(f->effective_G() > 0.0)) throw ValidationError("friedmann.G", "must be positive");
    for (std::size_t i = 0; i < f->fluids.size(); ++i) {
      if (f->fluids[i].rho0 < 0.0) {
        throw ValidationError("friedmann.fluids[" + std::to_string(i) + "].rho0", "must be >= 0");
      }
    }
    check_initial_scale(s, f->a0, "friedmann.initial.a");
    const double rho = friedmann::total_density(f->a0, f->fluids).rho;
    const double h2 = friedmann::friedmann_h_squared(f->a0, rho, kappa, f->Lambda, f->effective_G());
    if (h2 < 0.0) {
      throw ValidationError("friedmann.initial",
                            "constraint violation: Friedmann constraint needs H^2 = " +
                                std::to_string(h2) + " < 0");
    }
    return;
  }

  const auto& b = std::get<BransDickeConfig>(s.model);
  if (2.0 * b.params.coupling + 3.0 == 0.0) {
    throw ValidationError("bransdicke.coupling", "2w + 3 must be non-zero");
  }
  check_initial_scale(s, b.initial.a, "bransdicke.initial.a");
  if (!(b.initial.phi > 0.0)) throw ValidationError("bransdicke.initial.phi", "must be positive");
  if (!b.params.is_inflaton() && b.initial.rho < 0.0 && b.completion != bd::Completion::Rho) {
    throw ValidationError("bransdicke.initial.rho", "must be >= 0");
  }
  if (b.completion == bd::Completion::PsiDot && !b.params.is_inflaton()) {
    throw ValidationError("bransdicke.complete", "psi_dot completion needs inflaton matter");
  }
  if (b.completion == bd::Completion::Rho && b.params.is_inflaton()) {
    throw ValidationError("bransdicke.complete", "inflaton density follows from the field");
  }
  bd::BDState start = b.initial;
  if (b.completion) {
    try {
      start = bd::complete_initial_data(start, b.params, kappa, *b.completion);
    } catch (const InadmissibleStateError& e) {
      throw ValidationError("bransdicke.initial", std::string("constraint violation: ") + e.what());
    }
  }
  if (b.params.is_inflaton()) start.rho = bd::matter_state(start, b.params).rho;
  const double residual = bd::bd_constraint_residual(start, b.params, kappa);
  const double scale = std::max(1.0, start.H * start.H);
  if (!(std::abs(residual) <= kInitialConstraintTolerance * scale)) {
    throw ValidationError("bransdicke.initial",
                          "constraint violation: first-integral residual " +
                              std::to_string(residual) + " exceeds tolerance");
  }
}

RunResult run_scenario(const Scenario& s) {
  validate(s);
  const geometry::SpatialCurvature kappa(s.kappa);
  RunResult out;

  if (const auto* f = std::get_if<FlowConfig>(&s.model)) {
    flow::FlowProblem p;
    p.kappa = kappa;
    p.a0 = f->a0;
    p.a_dot0 = f->a_dot0;
    p.t_end = s.t_end;
    p.settings = s.integrator;
    p.guard = s.guard;
    p.grid = s.output_grid();
    const bool uses_sigma = f->formulation == flow::FormulationKind::Hubble ||
                            f->formulation == flow::FormulationKind::Chi;
    flow::Sigma sigma = f->sigma.value_or(flow::Sigma::Minus);
    if (uses_sigma && !f->sigma) {
      out.sigma_calibration = flow::calibrate_sigma();
      sigma = out.sigma_calibration->calibrated;
    }
    switch (f->formulation) {
      case flow::FormulationKind::Direct: p.formulation = flow::FlowFormulation::direct(); break;
      case flow::FormulationKind::Intrinsic: p.formulation = flow::FlowFormulation::intrinsic(); break;
      case flow::FormulationKind::Hubble: p.formulation = flow::FlowFormulation::hubble(sigma); break;
      case flow::FormulationKind::Chi: p.formulation = flow::FlowFormulation::chi(sigma); break;
    }
    if (uses_sigma) out.sigma_used = sigma;
    out.trajectory = flow::integrate_flow(p);
    return out;
  }

  if (const auto* f = std::get_if<FriedmannConfig>(&s.model)) {
    friedmann::FriedmannProblem p;
    p.background = {f->fluids, f->effective_G(), f->Lambda, kappa};
    p.a0 = f->a0;
    p.expansion_sign = f->a_dot_sign;
    p.t_end = s.t_end;
    p.density = f->density;
    p.settings = s.integrator;
    p.guard = s.guard;
    p.grid = s.output_grid();
    out.trajectory = friedmann::integrate_friedmann(p);
    return out;
  }

  const auto& b = std::get<BransDickeConfig>(s.model);
  bd::BDProblem p;
  p.params = b.params;
  p.kappa = kappa;
  p.initial = b.initial;
  p.t_end = s.t_end;
  p.settings = s.integrator;
  p.guard = s.guard;
  p.grid = s.output_grid();
  p.completion = b.completion;
  out.trajectory = bd::integrate_bransdicke(p);
  return out;
}

}  // namespace frw
