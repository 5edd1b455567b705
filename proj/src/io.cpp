#include "lppl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lppl/error.hpp"

namespace lppl {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(const Json& v, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) {
    if (indent > 0) out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        pad(depth + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += nl;
      pad(depth);
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
          out += ",";
          out += nl;
        }
        pad(depth + 1);
        dump_into(v[i], indent, depth + 1, out);
      }
      out += nl;
      pad(depth);
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += v.dump();
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

[[noreturn]] void row_error(ErrorCode code, std::size_t row, const std::string& what) {
  std::ostringstream os;
  os << "row " << row << ": " << what;
  throw Error(code, os.str());
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  dump_into(value, indent, 0, out);
  out += "\n";
  return out;
}

PriceSeries parse_csv(std::string_view text, bool log_scale) {
  std::vector<double> values;
  std::int64_t t0 = 0;
  std::int64_t expected = 0;
  std::size_t row = 0;
  bool any = false;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line =
        trim(eol == std::string_view::npos ? text : text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty()) continue;

    ++row;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) row_error(ErrorCode::Parse, row, "expected 't,price'");
    const std::string_view t_field = trim(line.substr(0, comma));
    const std::string_view p_field = trim(line.substr(comma + 1));

    if (!any && t_field == "t" && p_field == "price") {
      --row;  // rows are counted from the first data line
      continue;
    }

    std::int64_t t = 0;
    double price = 0.0;
    if (!parse_number(t_field, t)) row_error(ErrorCode::Parse, row, "day is not an integer");
    if (!parse_number(p_field, price) || !std::isfinite(price)) {
      row_error(ErrorCode::Parse, row, "price is not a finite number");
    }
    if (!any) {
      t0 = t;
      expected = t;
      any = true;
    }
    if (t != expected) {
      std::ostringstream os;
      os << "expected day " << expected << ", found " << t;
      row_error(ErrorCode::Gap, row, os.str());
    }
    if (log_scale) {
      if (!(price > 0.0)) row_error(ErrorCode::NonPositive, row, "log scale needs positive prices");
      price = std::log(price);
    }
    values.push_back(price);
    ++expected;
  }
  if (values.size() < 2) {
    throw Error(ErrorCode::Parse, "a price series needs at least two rows");
  }
  return PriceSeries(t0, std::move(values), log_scale ? Scale::Log : Scale::Raw);
}

PriceSeries load_csv(const std::filesystem::path& path, bool log_scale) {
  return parse_csv(read_file(path), log_scale);
}

std::string series_to_csv(const PriceSeries& series) {
  std::string out = "t,price\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += std::to_string(series.t0() + static_cast<std::int64_t>(i));
    out += ',';
    out += format_double(series[i]);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename onto " + path.string());
}

// ---------------------------------------------------------------------------

std::string_view to_string(FitStatus status) {
  switch (status) {
    case FitStatus::GradientTolerance: return "gradient_tolerance";
    case FitStatus::StepTolerance: return "step_tolerance";
    case FitStatus::ExactFit: return "exact_fit";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::AllStepsRejected: return "all_steps_rejected";
    case FitStatus::Diverged: return "diverged";
  }
  return "unknown";
}

Json params_to_json(const LpplParams& p) {
  Json j;
  j["A"] = p.A;
  j["B"] = p.B;
  j["C"] = p.C;
  j["t_c"] = p.t_c;
  j["alpha"] = p.alpha;
  j["omega"] = p.omega;
  j["phi"] = p.phi;
  return j;
}

LpplParams params_from_json(const Json& j) {
  try {
    return {j.at("A").get<double>(),     j.at("B").get<double>(),
            j.at("C").get<double>(),     j.at("t_c").get<double>(),
            j.at("alpha").get<double>(), j.at("omega").get<double>(),
            j.at("phi").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad parameter JSON: ") + e.what());
  }
}

Json fit_config_to_json(const FitConfig& c) {
  Json j;
  j["model"] = std::string(to_string(c.model));
  j["n_starts"] = c.n_starts;
  j["seed"] = c.seed;
  j["max_iters"] = c.max_iters;
  j["grad_tol"] = c.grad_tol;
  j["step_tol"] = c.step_tol;
  j["damping_init_factor"] = c.damping_init_factor;
  j["damping_scale"] = c.damping_scale;
  j["tc_escape_factor"] = c.tc_escape_factor;
  const InitRanges& r = c.init_ranges;
  j["init_ranges"] = {{"tc_offset", r.tc_offset},
                      {"tc_span_factor", r.tc_span_factor},
                      {"alpha", {r.alpha.lo, r.alpha.hi}},
                      {"omega", {r.omega.lo, r.omega.hi}},
                      {"phi", {r.phi.lo, r.phi.hi}}};
  return j;
}

FitConfig fit_config_from_json(const Json& j) {
  FitConfig c;
  try {
    if (j.contains("model")) c.model = model_kind_from_string(j["model"].get<std::string>());
    c.n_starts = j.value("n_starts", c.n_starts);
    c.seed = j.value("seed", c.seed);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.grad_tol = j.value("grad_tol", c.grad_tol);
    c.step_tol = j.value("step_tol", c.step_tol);
    c.damping_init_factor = j.value("damping_init_factor", c.damping_init_factor);
    c.damping_scale = j.value("damping_scale", c.damping_scale);
    c.tc_escape_factor = j.value("tc_escape_factor", c.tc_escape_factor);
    if (j.contains("init_ranges")) {
      const Json& r = j["init_ranges"];
      InitRanges& out = c.init_ranges;
      out.tc_offset = r.value("tc_offset", out.tc_offset);
      out.tc_span_factor = r.value("tc_span_factor", out.tc_span_factor);
      auto interval = [&](const char* key, Interval& iv) {
        if (r.contains(key)) iv = {r[key].at(0).get<double>(), r[key].at(1).get<double>()};
      };
      interval("alpha", out.alpha);
      interval("omega", out.omega);
      interval("phi", out.phi);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad fit config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

Json fit_to_json(const FitResult& fit) {
  Json j;
  j["model"] = std::string(to_string(fit.model));
  j["n_params"] = dof_param_count(fit.model);
  j.update(params_to_json(fit.params));
  j["S"] = fit.s;
  j["converged"] = fit.converged;
  j["status"] = std::string(to_string(fit.status));
  j["iterations"] = fit.iterations;
  j["start_index"] = fit.start_index;
  return j;
}

std::string residuals_to_csv(const FitResult& fit, const PriceSeries& series) {
  std::string out = "t,price,fitted,residual\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto t = series.t0() + static_cast<std::int64_t>(i);
    const double f = eval_model(fit.model, fit.params, static_cast<double>(t));
    out += std::to_string(t) + ',' + format_double(series[i]) + ',' + format_double(f) +
           ',' + format_double(series[i] - f) + '\n';
  }
  return out;
}

Json synth_spec_to_json(const SynthSpec& spec) {
  Json j = params_to_json(spec.truth);
  j["lambda"] = spec.noise.lambda;
  j["sigma"] = spec.noise.sigma;
  j["seed"] = spec.noise.seed;
  j["length"] = spec.length;
  j["t0"] = spec.t0;
  return j;
}

SynthSpec synth_spec_from_json(const Json& j) {
  SynthSpec spec;
  spec.truth = params_from_json(j);
  try {
    spec.noise.lambda = j.at("lambda").get<double>();
    spec.noise.sigma = j.at("sigma").get<double>();
    spec.noise.seed = j.at("seed").get<std::uint64_t>();
    spec.length = j.at("length").get<std::int64_t>();
    spec.t0 = j.at("t0").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad synth spec JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

namespace {
std::string param_name(Param p) { return std::string(kParamNames[static_cast<int>(p)]); }
}  // namespace

Json report_to_json(const SloppinessReport& report) {
  Json j;
  Json names = Json::array();
  for (Param p : report.params) names.push_back(param_name(p));
  j["params"] = names;
  j["eigenvalues"] = report.eigenvalues;
  j["eigenvectors"] = report.eigenvectors;
  if (report.orders_of_separation) {
    j["orders_of_separation"] = *report.orders_of_separation;
  } else {
    j["orders_of_separation"] = nullptr;
  }
  j["separation_defined"] = report.orders_of_separation.has_value();
  Json majors = Json::array();
  for (const auto& list : report.major_components) {
    Json row = Json::array();
    for (Param p : list) row.push_back(param_name(p));
    majors.push_back(row);
  }
  j["major_components"] = majors;
  return j;
}

std::string report_to_csv(const SloppinessReport& report) {
  std::string out = "lambda";
  for (Param p : report.params) out += ',' + param_name(p);
  out += '\n';
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    out += format_double(report.eigenvalues[i]);
    for (double x : report.eigenvectors[i]) out += ',' + format_double(x);
    out += '\n';
  }
  return out;
}

std::string track_to_csv(const EigenTrack& track) {
  std::size_t width = 0;
  for (const auto& s : track.spectra) width = std::max(width, s.size());
  std::string out = "date";
  for (std::size_t k = 0; k < width; ++k) out += ",lambda" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t i = 0; i < track.dates.size(); ++i) {
    out += std::to_string(track.dates[i]);
    for (std::size_t k = 0; k < width; ++k) {
      out += ',';
      out += k < track.spectra[i].size() ? format_double(track.spectra[i][k]) : "nan";
    }
    out += '\n';
  }
  return out;
}

Json track_to_json(const EigenTrack& track) {
  Json j;
  j["dates"] = track.dates;
  j["spectra"] = track.spectra;
  Json labels = Json::array();
  for (const auto& row : track.labels) {
    Json r = Json::array();
    for (Param p : row) r.push_back(param_name(p));
    labels.push_back(r);
  }
  j["labels"] = labels;
  j["crossings"] = track.crossings;
  j["missing"] = track.missing;
  return j;
}

namespace {
std::string level_tag(double level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", level * 100.0);
  return buf;
}
}  // namespace

std::string mc_to_csv(const McSummary& summary) {
  std::string out = "window_end,n_used,n_failed,mean_tc,std_tc,bias";
  for (double level : summary.levels) {
    out += ",lo" + level_tag(level) + ",hi" + level_tag(level);
  }
  out += '\n';
  for (const McRow& r : summary.rows) {
    out += std::to_string(r.window_end) + ',' + std::to_string(r.n_used) + ',' +
           std::to_string(r.n_failed) + ',' + format_double(r.mean_tc) + ',' +
           format_double(r.std_tc) + ',' + format_double(r.bias);
    for (const Interval& w : r.windows) {
      out += ',' + format_double(w.lo) + ',' + format_double(w.hi);
    }
    out += '\n';
  }
  return out;
}

std::string mc_gaussianity_to_csv(const McSummary& summary) {
  std::string out = "window_end,n_used,skewness,excess_kurtosis,z_skewness,z_kurtosis,pass\n";
  for (const McRow& r : summary.rows) {
    if (r.samples.size() < 20) continue;
    const GaussianityResult g = gaussianity_check(r.samples);
    out += std::to_string(r.window_end) + ',' + std::to_string(r.n_used) + ',' +
           format_double(g.skewness) + ',' + format_double(g.excess_kurtosis) + ',' +
           format_double(g.z_skewness) + ',' + format_double(g.z_kurtosis) + ',' +
           (g.pass ? "true" : "false") + '\n';
  }
  return out;
}

}  // namespace lppl
