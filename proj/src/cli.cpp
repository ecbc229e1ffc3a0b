#include "nullity/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nullity/almost_abelian.hpp"
#include "nullity/io.hpp"
#include "nullity/lie_metric.hpp"
#include "nullity/model_catalog.hpp"
#include "nullity/nullity_solver.hpp"
#include "nullity/splitting_flow.hpp"

namespace nullity::cli {

namespace {

using io::Json;

/// Thrown by a subcommand whose own checks failed; the report is still printed.
struct CheckFailed {
  Json report;
};

struct AlgebraSource {
  std::string input;
  std::string model;

  void attach(CLI::App* sub) {
    auto* in = sub->add_option("--input", input, "algebra JSON file");
    auto* mo = sub->add_option("--model", model,
                               "named algebra: milnor:l1,l2,l3 | heisenberg | conullity2:F | perrone:alpha | "
                               "table:FAMILY:theta");
    in->excludes(mo);
  }

  LieMetricSpace<double> load() const {
    if (!input.empty()) return io::lie_from_json(io::read_json_file(input));
    if (!model.empty()) return io::named_algebra(model);
    throw io::InputError("one of --input or --model is required");
  }
};

struct MatrixSource {
  std::string input;
  std::string matrix;

  void attach(CLI::App* sub) {
    auto* in = sub->add_option("--input", input, "matrix JSON file {\"m\", \"A\"}");
    auto* mx = sub->add_option("--matrix", matrix, "inline matrix, rows split by ';', entries by ','");
    in->excludes(mx);
  }

  Eigen::MatrixXd load() const {
    if (!input.empty()) return io::matrix_from_json(io::read_json_file(input));
    if (!matrix.empty()) return io::parse_matrix(matrix);
    throw io::InputError("one of --input or --matrix is required");
  }
};

LieMetricSpace<double> load_valid(const AlgebraSource& src) {
  auto space = src.load();
  const auto report = validate_algebra(space);
  if (!report.passed) {
    Json j;
    j["valid"] = false;
    j["failures"] = report.failures;
    throw CheckFailed{j};
  }
  return space;
}

Json validation_json(const ValidationReport<double>& r) {
  Json j;
  j["valid"] = r.passed;
  j["antisymmetry_violation"] = r.antisymmetry_violation;
  j["jacobi_residual"] = r.jacobi_residual;
  j["metric_asymmetry"] = r.metric_asymmetry;
  j["metric_min_eigenvalue"] = r.metric_min_eigenvalue;
  j["failures"] = r.failures;
  return j;
}

Json triple_json(const MilnorTriple<double>& t) { return Json::array({t.lambda1, t.lambda2, t.lambda3}); }

Json table_json(const TableRowReport<double>& r) {
  Json j;
  j["family"] = family_name(r.family);
  j["theta"] = r.theta;
  j["triple"] = triple_json(r.triple);
  j["group"] = r.group;
  j["scal"] = r.scal;
  j["plane_curvature"] = r.plane_curvature;
  j["nullity_kappa"] = r.expected.kappa;
  j["nullity_index"] = r.nullity_index;
  j["nullity_angle_to_e1"] = r.nullity_angle;
  Json e;
  e["group"] = r.expected.group;
  e["scal"] = r.expected.scal;
  e["plane_curvature"] = r.expected.plane_curvature;
  e["nullity_index"] = r.expected.nullity_index;
  j["expected"] = std::move(e);
  j["pass"] = r.pass();
  j["mismatches"] = r.mismatches;
  return j;
}

std::pair<TableFamily, double> parse_row(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw io::InputError("row must be FAMILY:theta, got '" + s + "'");
  const auto vals = io::parse_list(s.substr(colon + 1));
  if (vals.size() != 1) throw io::InputError("row must be FAMILY:theta, got '" + s + "'");
  return {parse_family(s.substr(0, colon)), vals[0]};
}

Json columns(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(io::to_json(Eigen::VectorXd(m.col(c))));
  return out;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nullity distributions of left-invariant metrics on Lie groups", "nullity"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "expand all subcommand help");

  std::function<Json()> action;

  // validate
  AlgebraSource validate_src;
  auto* validate = app.add_subcommand("validate", "check antisymmetry, Jacobi identity and metric");
  validate_src.attach(validate);
  validate->callback([&] {
    action = [&] {
      const auto report = validate_algebra(validate_src.load());
      if (!report.passed) throw CheckFailed{validation_json(report)};
      return validation_json(report);
    };
  });

  // curvature
  AlgebraSource curv_src;
  auto* curv_cmd = app.add_subcommand("curvature", "Ricci, scalar and frame sectional curvatures");
  curv_src.attach(curv_cmd);
  curv_cmd->callback([&] {
    action = [&] {
      const auto space = load_valid(curv_src);
      const auto c = curvature(space);
      Json j;
      j["dim"] = space.dim();
      j["scal"] = c.scal;
      j["ricci"] = io::to_json(c.ricci);
      j["sectional"] = io::to_json(frame_sectional_curvatures(c, space.metric()));
      return j;
    };
  });

  // nullity
  AlgebraSource nul_src;
  double nul_kappa = 0, nul_tol = kRankTol;
  auto* nul_cmd = app.add_subcommand("nullity", "kappa-nullity distribution at a fixed kappa");
  nul_src.attach(nul_cmd);
  nul_cmd->add_option("--kappa", nul_kappa, "nullity constant")->required();
  nul_cmd->add_option("--tol", nul_tol, "relative singular value threshold");
  nul_cmd->callback([&] {
    action = [&] {
      const auto space = load_valid(nul_src);
      return io::to_json(nullity_index(curvature(space), space.metric(), nul_kappa, nul_tol));
    };
  });

  // nullity-scan
  AlgebraSource scan_src;
  std::string scan_range = "-2:2:401", scan_csv;
  double scan_tol = kRankTol;
  auto* scan_cmd = app.add_subcommand("nullity-scan", "find all kappa with a nontrivial nullity on a grid");
  scan_src.attach(scan_cmd);
  scan_cmd->add_option("--range", scan_range, "kappa grid a:b:n")->capture_default_str();
  scan_cmd->add_option("--tol", scan_tol, "relative singular value threshold");
  scan_cmd->add_option("--csv", scan_csv, "write kappa,sigma_min,index samples");
  scan_cmd->callback([&] {
    action = [&] {
      const auto space = load_valid(scan_src);
      const auto res = kappa_scan(curvature(space), space.metric(), io::parse_range(scan_range), scan_tol);
      if (!scan_csv.empty()) {
        std::ofstream csv(scan_csv);
        if (!csv) throw io::InputError("cannot write '" + scan_csv + "'");
        csv << "kappa,sigma_min,index\n";
        char buf[96];
        for (const auto& s : res.samples) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", s.kappa, s.sigma_min, s.index);
          csv << buf;
        }
      }
      Json j;
      Json det = Json::array();
      for (std::size_t i = 0; i < res.detected.size(); ++i) {
        Json d;
        d["kappa"] = res.detected[i];
        d["index"] = res.detected_index[i];
        det.push_back(std::move(d));
      }
      j["detected"] = std::move(det);
      j["samples"] = res.samples.size();
      return j;
    };
  });

  // growth
  AlgebraSource growth_src;
  std::vector<int> growth_span;
  auto* growth_cmd = app.add_subcommand("growth", "growth vector of the distribution spanned by frame vectors");
  growth_src.attach(growth_cmd);
  growth_cmd->add_option("--span", growth_span, "0-based frame indices")->required()->delimiter(',');
  growth_cmd->callback([&] {
    action = [&] {
      const auto space = load_valid(growth_src);
      Eigen::MatrixXd d(space.dim(), static_cast<Eigen::Index>(growth_span.size()));
      for (std::size_t a = 0; a < growth_span.size(); ++a) {
        if (growth_span[a] < 0 || growth_span[a] >= space.dim()) throw io::InputError("--span index out of range");
        d.col(static_cast<Eigen::Index>(a)) = unit_vector<double>(space.dim(), growth_span[a]);
      }
      const auto gv = growth_vector(space, d);
      Json j;
      j["growth"] = gv.dims;
      j["bracket_generating"] = gv.bracket_generating;
      j["step"] = gv.step;
      return j;
    };
  });

  // milnor
  std::string milnor_lambda, milnor_row;
  auto* milnor_cmd = app.add_subcommand("milnor", "unimodular 3-dimensional algebra from a Milnor triple");
  milnor_cmd->add_option("--lambda", milnor_lambda, "l1,l2,l3")->required();
  milnor_cmd->add_option("--table-check", milnor_row, "compare against a table row FAMILY:theta");
  milnor_cmd->callback([&] {
    action = [&] {
      const auto v = io::parse_list(milnor_lambda);
      if (v.size() != 3) throw io::InputError("--lambda needs three values");
      const MilnorTriple<double> t{v[0], v[1], v[2]};
      const auto space = milnor_algebra(t);
      const auto c = curvature(space);
      Json j;
      j["triple"] = triple_json(t);
      j["group"] = classify_unimodular(t);
      j["scal"] = c.scal;
      j["sectional"] = io::to_json(frame_sectional_curvatures(c, space.metric()));
      j["algebra"] = io::lie_to_json(space);
      if (!milnor_row.empty()) {
        const auto [fam, theta] = parse_row(milnor_row);
        auto r = table_row_check(fam, theta);
        const auto want = r.triple.values();
        for (int i = 0; i < 3; ++i)
          if (std::abs(want[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)]) > kTableTol) {
            r.mismatches.push_back("--lambda differs from the row's triple");
            break;
          }
        j["table_check"] = table_json(r);
        if (!r.pass()) throw CheckFailed{j};
      }
      return j;
    };
  });

  // table-check
  std::string table_row;
  auto* table_cmd = app.add_subcommand("table-check", "check one row of the curvature tables");
  table_cmd->add_option("--row", table_row, "FAMILY:theta with FAMILY in T1F1, T1F2, T2")->required();
  table_cmd->callback([&] {
    action = [&] {
      const auto [fam, theta] = parse_row(table_row);
      const auto r = table_row_check(fam, theta);
      if (!r.pass()) throw CheckFailed{table_json(r)};
      return table_json(r);
    };
  });

  // splitting
  MatrixSource split_src;
  double split_kappa = 0;
  std::string split_range = "-2:2:41", split_csv;
  std::optional<double> split_kd0;
  bool split_limits = false;
  auto* split_cmd = app.add_subcommand("splitting", "closed-form splitting tensor along a nullity geodesic");
  split_src.attach(split_cmd);
  split_cmd->add_option("--kappa", split_kappa, "nullity constant")->required();
  split_cmd->add_option("--range", split_range, "time grid a:b:n")->capture_default_str();
  split_cmd->add_option("--csv", split_csv, "write the trace CSV here");
  split_cmd->add_option("--kd0", split_kd0, "initial conullity-plane curvature (2x2, kappa <= 0)");
  split_cmd->add_flag("--limits", split_limits, "trace limits of the kappa = -1 flow");
  split_cmd->callback([&] {
    action = [&] {
      const SplittingState<double> state(split_kappa, split_src.load());
      const auto ts = io::parse_range(split_range);
      Json j;
      j["kappa"] = split_kappa;
      j["C0"] = io::to_json(state.c0);
      j["first_singularity"] = optional_json(first_singularity(state));
      j["singular_times"] = singular_times(state, ts.front(), ts.back());
      if (!split_csv.empty()) {
        std::ofstream csv(split_csv);
        if (!csv) throw io::InputError("cannot write '" + split_csv + "'");
        j["skipped"] = io::write_splitting_csv(csv, state, ts, split_kd0);
        j["csv"] = split_csv;
      } else {
        Json rows = Json::array();
        for (double t : ts) {
          Json row;
          row["t"] = t;
          try {
            const auto c = splitting_at(state, t);
            row["C"] = io::to_json(c);
            row["trC"] = c.trace();
          } catch (const SingularityError&) {
            row["C"] = nullptr;
            row["trC"] = nullptr;
          }
          row["detJ0"] = j0_matrix(state, t).determinant();
          if (split_kd0) {
            try {
              row["KD"] = conullity2_evolution(*split_kd0, split_kappa, state.c0, t);
            } catch (const SingularityError&) {
              row["KD"] = nullptr;
            }
          }
          rows.push_back(std::move(row));
        }
        j["samples"] = std::move(rows);
      }
      if (split_limits) {
        if (split_kappa != -1.0) throw io::InputError("--limits applies to the kappa = -1 flow");
        const auto lim = trace_limits(state.c0);
        Json l;
        l["m"] = lim.m;
        l["sigma"] = lim.sigma;
        l["k_plus"] = lim.k_plus;
        l["k_minus"] = lim.k_minus;
        l["limit_plus"] = optional_json(lim.limit_plus);
        l["limit_minus"] = optional_json(lim.limit_minus);
        l["forward_singularity"] = optional_json(lim.forward_singularity);
        l["backward_singularity"] = optional_json(lim.backward_singularity);
        l["identity_residual"] = lim.identity_residual;
        l["flags"] = lim.flags;
        j["trace_limits"] = std::move(l);
      }
      return j;
    };
  });

  // aa
  MatrixSource aa_src;
  auto* aa_cmd = app.add_subcommand("aa", "curvature of the almost-Abelian group R x_A V");
  aa_src.attach(aa_cmd);
  aa_cmd->callback([&] {
    action = [&] {
      const AlmostAbelianGroup<double> g(aa_src.load());
      const auto c = aa_curvature(g);
      Json j = io::matrix_doc(g.a());
      j["unimodular"] = g.unimodular();
      j["scal"] = c.scal;
      j["ricci"] = io::to_json(c.ricci);
      j["algebra"] = io::lie_to_json(to_lie_metric(g));
      return j;
    };
  });

  // aa-nullity
  MatrixSource aan_src;
  auto* aan_cmd = app.add_subcommand("aa-nullity", "0-nullity of an almost-Abelian group (vectors in V)");
  aan_src.attach(aan_cmd);
  aan_cmd->callback([&] {
    action = [&] {
      const AlmostAbelianGroup<double> g(aan_src.load());
      const auto basis = aa_nullity(g);
      Json j;
      j["kappa"] = 0.0;
      j["index"] = basis.cols();
      j["basis"] = columns(basis);
      return j;
    };
  });

  // lattice
  MatrixSource lat_src;
  std::optional<double> lat_lambda;
  std::string lat_mode = "exponential";
  double lat_tol = kIntegralityTol;
  int lat_bound = 10;
  auto* lat_cmd = app.add_subcommand("lattice", "integrality test or lambda search for a lattice");
  lat_src.attach(lat_cmd);
  lat_cmd->add_option("--lambda", lat_lambda, "scaling to test; omit to search");
  lat_cmd->add_option("--mode", lat_mode, "linear | exponential")->capture_default_str()
      ->check(CLI::IsMember({"linear", "exponential"}));
  lat_cmd->add_option("--tol", lat_tol, "integrality tolerance");
  lat_cmd->add_option("--bound", lat_bound, "search bound on |tr exp(lambda A)|")->capture_default_str();
  lat_cmd->callback([&] {
    action = [&] {
      const auto a = lat_src.load();
      const auto mode = lat_mode == "linear" ? LatticeMode::linear : LatticeMode::exponential;
      Json j;
      j["mode"] = lat_mode;
      if (lat_lambda) {
        const auto r = integrality_check(a, *lat_lambda, mode, lat_tol);
        j["lambda"] = *lat_lambda;
        j["integral"] = r.integral;
        j["coefficients"] = r.coefficients;
        j["raw"] = r.raw;
        j["max_deviation"] = r.max_deviation;
        j["determinant"] = r.determinant;
        return j;
      }
      if (mode != LatticeMode::exponential) throw io::InputError("lambda search runs in exponential mode");
      j["bound"] = lat_bound;
      j["lambdas"] = lattice_lambda_search(a, lat_bound, lat_tol);
      return j;
    };
  });

  // example5
  auto* ex5_cmd = app.add_subcommand("example5", "rebuild the 5-dimensional example with 0-nullity 1");
  ex5_cmd->callback([&] {
    action = [&] {
      const auto r = construct_example5();
      Json j;
      j["C"] = io::to_json(r.integer_matrix);
      j["alpha"] = r.alpha;
      j["beta"] = r.beta;
      j["gamma"] = r.gamma;
      j["eigen_consistency"] = r.eigen_consistency;
      j["sigma"] = r.sigma;
      j["mu"] = r.mu;
      j["nu"] = r.nu;
      j["a"] = r.a;
      j["b"] = r.b;
      j["c"] = r.c;
      j["A"] = io::to_json(r.A);
      j["trace_A"] = r.trace_A;
      j["charpoly_A"] = r.charpoly_A;
      j["charpoly_B"] = r.charpoly_B;
      j["charpoly_mismatch"] = r.charpoly_mismatch;
      j["nullity_index"] = r.nullity_index;
      j["nullity_basis"] = columns(r.nullity_basis);
      j["solver_nullity_index"] = r.solver_nullity_index;
      j["splitting_C_X2_xi"] = io::to_json(r.splitting_value);
      return j;
    };
  });

  // nul1-group
  int nul1_m = 4;
  auto* nul1_cmd = app.add_subcommand("nul1-group", "A = diag(I, -I) with a lattice and (-1)-nullity 1");
  nul1_cmd->add_option("--m", nul1_m, "even dimension of V")->capture_default_str();
  nul1_cmd->callback([&] {
    action = [&] {
      const auto r = nul1_group<double>(nul1_m);
      Json j;
      j["m"] = r.m;
      j["A"] = io::to_json(r.group.a());
      j["lambda"] = r.witness_lambda;
      j["integral"] = r.witness.integral;
      j["coefficients"] = r.witness.coefficients;
      j["scal"] = r.scal;
      j["nullity"] = io::to_json(r.nullity);
      return j;
    };
  });

  // radon-hurwitz
  long long rh_m = 1;
  std::optional<int> rh_n, rh_d;
  auto* rh_cmd = app.add_subcommand("radon-hurwitz", "Radon-Hurwitz number and the nullity obstruction");
  rh_cmd->add_option("--m", rh_m, "positive integer")->required();
  rh_cmd->add_option("--n", rh_n, "algebra dimension for the obstruction check");
  rh_cmd->add_option("--d", rh_d, "nullity dimension for the obstruction check");
  rh_cmd->callback([&] {
    action = [&] {
      Json j;
      j["m"] = rh_m;
      j["rho"] = radon_hurwitz(rh_m);
      if (rh_n || rh_d) {
        if (!rh_n || !rh_d) throw io::InputError("--n and --d go together");
        j["n"] = *rh_n;
        j["d"] = *rh_d;
        j["admissible"] = rh_obstruction_check(*rh_n, *rh_d);
      }
      return j;
    };
  });

  // blowup
  double bl_beta0 = 0, bl_delta = 1;
  auto* bl_cmd = app.add_subcommand("blowup", "blow-up time of beta' = delta^2 + beta^2");
  bl_cmd->add_option("--beta0", bl_beta0, "initial value")->required();
  bl_cmd->add_option("--delta", bl_delta, "positive rate")->required();
  bl_cmd->callback([&] {
    action = [&] {
      const auto r = scalar_riccati_blowup(bl_beta0, bl_delta);
      Json j;
      j["beta0"] = bl_beta0;
      j["delta"] = bl_delta;
      j["bound"] = r.bound;
      j["numeric_blowup"] = r.numeric_blowup;
      j["steps"] = r.steps;
      return j;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    const CLI::App* failed = &app;
    for (const auto* s : app.get_subcommands()) failed = s;
    err << failed->help();
    return kExitUsage;
  }

  try {
    out << io::dump(action());
    return kExitOk;
  } catch (const CheckFailed& f) {
    out << io::dump(f.report);
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace nullity::cli
