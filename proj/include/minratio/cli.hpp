#pragma once

// Command-line front end. `cli_main` parses flags, merges them over the
// config file and environment, runs one command and writes its artifacts
// plus a manifest (config, version, SHA-256 of every file written).
//
// Exit status: 0 success, 2 invalid configuration, 3 exact-solver capacity.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "minratio/bounds.hpp"
#include "minratio/config.hpp"
#include "minratio/estimate.hpp"
#include "minratio/exact.hpp"
#include "minratio/io.hpp"
#include "minratio/search.hpp"

#ifndef MINRATIO_VERSION
#define MINRATIO_VERSION "unknown"
#endif

namespace minratio {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapacity = 3;

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

/// Collects output files and writes them atomically, recording digests.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    digests_[name] = sha256_hex(content);
  }

  void write_manifest(const ExperimentConfig& config) {
    nlohmann::json j;
    j["version"] = MINRATIO_VERSION;
    j["config"] = describe(config);
    j["files"] = digests_;
    write_file_atomic(dir_ / "manifest.json", j.dump(2) + "\n");
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> digests_;
};

namespace detail {

inline std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(idx[i]);
  }
  return out;
}

inline std::string solution_header() { return "functional,n,m,length,ratio,optimal,order"; }

inline std::string solution_row(const std::string& functional, std::size_t n, std::size_t m, double length,
                                 bool optimal, const std::vector<std::size_t>& order) {
  return join({functional, std::to_string(n), std::to_string(m), format_double(length),
               format_double(length / static_cast<double>(m)), optimal ? "true" : "false", join_indices(order)});
}

inline std::string bound_header() { return "target,direction,d,delta,value,ci,derivation"; }

inline std::string bound_row(const BoundResult& b) {
  const auto delta = b.auxiliary.count("delta") ? format_double(b.auxiliary.at("delta")) : std::string();
  const auto ci = b.auxiliary.count("ci_half_width") ? format_double(b.auxiliary.at("ci_half_width")) : std::string();
  return join({to_string(b.target), to_string(b.direction), std::to_string(b.dim), delta, format_double(b.value), ci,
               to_string(b.derivation)});
}

inline std::vector<std::size_t> as_sizes(const std::vector<double>& xs) {
  std::vector<std::size_t> out;
  for (double x : xs) out.push_back(static_cast<std::size_t>(x));
  return out;
}

inline double first_or(const std::vector<double>& xs, double fallback) { return xs.empty() ? fallback : xs.front(); }

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("arguments: " + msg);
}

inline std::string trace_csv(const DinkelbachResult& r) {
  std::string out = "iteration,c,l,m,w\n";
  for (const auto& s : r.trace) {
    out += join({std::to_string(s.iteration), format_double(s.c), format_double(s.incumbent.length),
                 std::to_string(s.incumbent.edges), format_double(s.incumbent.ratio)}) +
           "\n";
  }
  return out;
}

inline void write_estimates(ArtifactWriter& w, const std::vector<EstimateRecord>& recs, const std::string& x_column,
                            const std::string& title, std::ostream& err) {
  w.write("estimates.csv", estimates_to_csv(recs));
  w.write("estimates.gp", gnuplot_script("estimates.csv", x_column, title));
  for (const auto& r : recs) {
    for (const auto& warning : r.warnings) err << "warning: " << warning << "\n";
  }
  for (const auto* r : lower_bound_violations(recs)) {
    err << "warning: mean " << format_double(r->mean) << " below the analytic lower bound\n";
  }
}

}  // namespace detail

/// Executes a validated configuration. Throws ConfigError / CapacityError.
inline void run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  using namespace detail;
  ArtifactWriter writer(c.out);
  const auto d = static_cast<std::size_t>(c.dim);
  auto search = c.estimate_options(1).search;

  auto load_or = [&](auto make) -> PointSet {
    if (c.input.empty()) return make();
    std::optional<Region> region;
    if (!c.s.empty()) region = Region::cube(d, c.s.front());
    return point_set_from_csv(read_file(c.input), region);
  };

  if (c.command == "sample") {
    const std::size_t reps = c.replicates.value_or(1);
    for (std::size_t r = 0; r < reps; ++r) {
      PointSet pts = c.n.empty() ? sample_poisson(Region::cube(d, first_or(c.s, 10.0)), 1.0, c.seed, r)
                                 : sample_uniform(static_cast<long long>(c.n.front()),
                                                  Region::cube(d, std::pow(c.n.front(), 1.0 / c.dim)), c.seed, r);
      writer.write(reps == 1 ? "points.csv" : "points_" + std::to_string(r) + ".csv", point_set_to_csv(pts));
      out << "replicate " << r << ": " << pts.size() << " points\n";
    }
  } else if (c.command == "solve-cycle") {
    std::string csv = solution_header() + "\n";
    const std::size_t reps = c.input.empty() ? c.replicates.value_or(1) : 1;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto pts = load_or([&] {
        require(!c.n.empty(), "solve-cycle needs --input or --n");
        const double n = c.n.front();
        return sample_uniform(static_cast<long long>(n), Region::cube(d, std::pow(n, 1.0 / c.dim)), c.seed, r);
      });
      std::size_t m = pts.size();
      if (!c.m.empty()) m = static_cast<std::size_t>(c.m.front());
      else if (!c.delta.empty()) m = ceil_fraction(c.delta.front(), static_cast<double>(pts.size()));
      const bool exact = c.solver == SolverPolicy::exact || (c.solver == SolverPolicy::automatic && pts.size() <= c.cap);
      CycleSolution sol;
      if (exact) {
        sol = exact_k_cycle(pts, m, c.cap);
      } else {
        sol = local_search_k_cycle(pts, m, replicate_search(search, c.seed, r));
      }
      csv += solution_row("L(n,m)", pts.size(), m, sol.length, sol.optimal, sol.order) + "\n";
      out << "replicate " << r << ": L(" << pts.size() << "," << m << ") = " << format_double(sol.length)
          << (sol.optimal ? " (optimal)" : " (heuristic)") << "\n";
    }
    writer.write("solutions.csv", csv);
  } else if (c.command == "solve-path") {
    std::string csv = solution_header() + "\n";
    require(!c.m.empty(), "solve-path needs --m");
    const auto m = static_cast<std::size_t>(c.m.front());
    const std::size_t reps = c.input.empty() ? c.replicates.value_or(1) : 1;
    const Point origin(std::vector<double>(d, 0.0));
    for (std::size_t r = 0; r < reps; ++r) {
      const auto pts = load_or([&] { return sample_poisson_ball(c.dim, c.window * m * c.scale, c.seed, r); });
      PathSolution sol;
      const auto rs = replicate_search(search, c.seed, r);
      if (c.solver != SolverPolicy::heuristic && pts.size() <= c.cap) {
        sol = exact_origin_path(pts, m, origin, c.cap);
      } else if (c.solver == SolverPolicy::heuristic) {
        sol = heuristic_origin_path(pts, m, origin, rs);
      } else if (auto bb = branch_and_bound_origin_path(pts, m, origin, 2'000'000, rs)) {
        sol = *bb;
      } else if (c.solver == SolverPolicy::exact) {
        throw CapacityError(pts.size(), c.cap);
      } else {
        sol = heuristic_origin_path(pts, m, origin, rs);
      }
      csv += solution_row("T_m", pts.size(), m, sol.length, sol.optimal, sol.order) + "\n";
      out << "replicate " << r << ": T_" << m << " = " << format_double(sol.length) << "\n";
    }
    writer.write("solutions.csv", csv);
  } else if (c.command == "solve-ratio" || c.command == "oriented") {
    if (c.command == "oriented" && c.input.empty() && c.s.size() >= 1 && c.replicates.value_or(1) > 1) {
      auto opts = c.estimate_options(50);
      auto recs = estimate_oriented(c.s, opts);
      write_estimates(writer, recs, "s", "oriented minimum ratio", err);
      for (const auto& r : recs) {
        out << "s=" << format_double(*r.s) << " mean w=" << format_double(r.mean) << " +- "
            << format_double(r.stderr_mean) << "\n";
      }
    } else {
      const double side = first_or(c.s, 10.0);
      const auto pts = load_or([&] { return sample_poisson(Region::cube(d, side), 1.0, c.seed, 0); });
      const Region region = c.input.empty() || !c.s.empty() ? Region::cube(d, side) : pts.region();
      std::optional<std::size_t> limit;
      if (c.eta) limit = floor_fraction(*c.eta, region.sides().front());
      DinkelbachResult res;
      if (c.command == "oriented") {
        res = oriented_path_search(pts, region, search);
      } else {
        if (c.solver == SolverPolicy::exact && pts.size() > c.cap) throw CapacityError(pts.size(), c.cap);
        auto s = search;
        s.allow_exact_inner = c.solver != SolverPolicy::heuristic;
        res = dinkelbach_search(pts, region, limit, s);
      }
      std::string csv = solution_header() + "\n";
      csv += solution_row(c.command == "oriented" ? "W_s_oriented" : (limit ? "W_s_eta" : "W_s"), pts.size(),
                          res.path.edges, res.path.length, res.path.optimal, res.path.interior) +
             "\n";
      writer.write("solutions.csv", csv);
      if (c.trace) writer.write("trace.csv", trace_csv(res));
      out << "w = " << format_double(res.path.ratio) << " over " << res.path.edges << " edges\n";
    }
  } else if (c.command == "bound") {
    std::string csv = bound_header() + "\n";
    const auto lb = brw_lower_bound(c.dim);
    csv += bound_row(lb) + "\n";
    out << "d=" << c.dim << " lower bound c(0+) >= " << format_double(lb.value)
        << " lambda* = " << format_double(lb.auxiliary.at("lambda_star")) << "\n";
    if (!c.s.empty()) {
      auto opts = c.estimate_options(20);
      std::vector<FiniteSizeSample> samples;
      for (double s : c.s) samples.push_back(sample_finite_s(c.dim, s, first_or(c.delta, 1.0), opts));
      const auto ub = finite_s_upper_bound(samples, c.dim, c.level);
      csv += bound_row(ub) + "\n";
      out << "upper bound delta*c(delta) <= " << format_double(ub.value) << " (+" << format_double(ub.auxiliary.at("ci_half_width"))
          << " at level " << format_double(c.level) << ")\n";
    }
    writer.write("bounds.csv", csv);
  } else if (c.command == "estimate-cdelta") {
    require(!c.n.empty(), "estimate-cdelta needs --n");
    auto deltas = c.delta.empty() ? std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0} : c.delta;
    auto curve = estimate_c_delta(c.dim, static_cast<std::size_t>(c.n.front()), deltas, c.estimate_options(20));
    write_estimates(writer, curve.records, "delta", "c(delta)", err);
    if (curve.records.size() >= 3) {
      out << "monotonicity violations: " << monotonicity_check(curve).violations.size() << "\n";
      out << "convexity violations: " << convexity_check(curve).violations.size() << "\n";
    }
    for (const auto& r : curve.records) {
      out << "delta=" << format_double(*r.delta) << " mean=" << format_double(r.mean) << " se="
          << format_double(r.stderr_mean) << "\n";
    }
  } else if (c.command == "estimate-w") {
    require(!c.s.empty(), "estimate-w needs --s");
    auto recs = estimate_w(c.dim, c.s, c.eta, c.estimate_options(20));
    write_estimates(writer, recs, "s", c.eta ? "W_s^eta" : "W_s", err);
    for (const auto& r : recs) {
      out << "s=" << format_double(*r.s) << " mean W=" << format_double(r.mean) << " se="
          << format_double(r.stderr_mean) << "\n";
    }
  } else if (c.command == "estimate-t") {
    require(!c.m.empty(), "estimate-t needs --m");
    WindowOptions window{c.window, c.scale};
    auto recs = estimate_t(c.dim, as_sizes(c.m), c.estimate_options(20), window);
    write_estimates(writer, recs, "m", "T_m / m", err);
    std::string var = "m,replicates,mean_T,var_T\n";
    for (const auto& r : recs) {
      var += join({format_double(*r.m), std::to_string(r.replicates), format_double(r.mean * *r.m),
                   format_double(r.raw_variance)}) +
             "\n";
      out << "m=" << format_double(*r.m) << " mean T/m=" << format_double(r.mean) << " var T="
          << format_double(r.raw_variance) << "\n";
    }
    writer.write("tm_variance.csv", var);
  } else if (c.command == "estimate-lnm") {
    require(!c.n.empty(), "estimate-lnm needs --n");
    auto recs = estimate_lnm(c.dim, as_sizes(c.n), MRule::parse(c.rule), c.estimate_options(20));
    write_estimates(writer, recs, "n", "L(n,m_n)/m_n", err);
    for (const auto& r : recs) {
      out << "n=" << format_double(*r.n) << " m=" << format_double(*r.m) << " mean=" << format_double(r.mean) << "\n";
    }
  } else if (c.command == "fit-alpha") {
    require(!c.input.empty(), "fit-alpha needs --input estimates.csv");
    const auto recs = estimates_from_csv(read_file(c.input));
    CurveEstimate curve;
    curve.d = c.dim;
    std::optional<double> c0 = c.c0;
    double largest_s = -1.0;
    for (const auto& r : recs) {
      if (r.functional == Functional::Ln_delta) curve.records.push_back(r);
      if (!c.c0 && (r.functional == Functional::Ws) && r.s && *r.s > largest_s) {
        largest_s = *r.s;
        c0 = r.mean;
      }
    }
    require(c0.has_value(), "fit-alpha needs --c0 or W_s rows in the input");
    const auto fit = fit_scaling_exponent(curve, *c0);
    std::vector<std::string> grid;
    for (double g : fit.grid) grid.push_back(format_double(g));
    writer.write("fit.csv", "alpha,c0,log_prefactor,residual_norm,grid\n" +
                                join({format_double(fit.alpha), format_double(fit.c0), format_double(fit.log_prefactor),
                                      format_double(fit.residual_norm), join(grid, ';')}) +
                                "\n");
    out << "alpha = " << format_double(fit.alpha) << " (mean-field comparison value 1/3)\n";
  }
  writer.write_manifest(c);
}

/// Full entry point: argv parsing, config merge, run, exit status.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr,
                    const char* const* envp = nullptr) {
  CLI::App app{"Minimum average edge-length paths and cycles through random points"};
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::string config_file;
  bool trace = false;
  std::vector<CLI::App*> subs;
  for (const auto& cmd : known_commands()) {
    auto* sub = app.add_subcommand(cmd);
    sub->add_option("--config", config_file, "sectioned key = value config file");
    for (const auto& [key, section] : config_sections()) {
      if (key == "command" || key == "trace") continue;
      sub->add_option("--" + key, values[key]);
    }
    sub->add_flag("--trace", trace, "write per-iteration trace.csv");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    RawConfig raw;
    if (!config_file.empty()) parse_config_text(read_file(config_file), config_file, raw);
    apply_environment(raw, envp);
    CLI::App* chosen = nullptr;
    for (auto* sub : subs) {
      if (sub->parsed()) chosen = sub;
    }
    raw["command"] = {chosen->get_name(), "command line"};
    for (const auto& [key, section] : config_sections()) {
      if (key == "command" || key == "trace") continue;
      if (chosen->count("--" + key)) raw[key] = {values[key], "argument --" + key};
    }
    if (trace) raw["trace"] = {"true", "argument --trace"};
    const auto config = validate_config(raw);
    run(config, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace minratio
