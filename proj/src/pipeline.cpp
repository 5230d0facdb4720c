#include "sem/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <optional>
#include <sstream>

#include "sem/basis_smooth.hpp"
#include "sem/error.hpp"
#include "sem/fpca.hpp"
#include "sem/hmd_ingest.hpp"
#include "sem/key_inversion.hpp"
#include "sem/modification.hpp"
#include "sem/parallel.hpp"
#include "sem/text.hpp"

namespace sem {

namespace fs = std::filesystem;
using text::fmt;

std::uint64_t file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

/// Output files of one subcommand, written whole and recorded for the manifest.
class Outputs {
 public:
  explicit Outputs(const RunConfig& cfg) : dir_(cfg.output_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& body) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    written_.push_back(name);
  }

  void manifest(const RunConfig& cfg, const std::string& subcommand, const std::vector<std::string>& inputs) {
    std::ostringstream m;
    m << cfg.echo() << "\n[manifest]\nsubcommand = " << subcommand << "\nformat = sem-manifest v1\n";
    auto list = [&](const char* key, const std::vector<std::string>& names) {
      m << key << " = ";
      for (std::size_t i = 0; i < names.size(); ++i) {
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(file_hash(dir_ / names[i])));
        m << (i ? ", " : "") << names[i] << ":" << hex;
      }
      m << "\n";
    };
    list("inputs", inputs);
    list("outputs", written_);
    const auto path = dir_ / ("manifest_" + subcommand + ".ini");
    std::ofstream out(path, std::ios::binary);
    out << m.str();
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

std::ifstream open_input(const fs::path& path, const char* hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string() + " (" + hint + ")");
  return in;
}

CohortPanel load_panel(const RunConfig& cfg) {
  auto in = open_input(cfg.output_dir / "mortality.tsv", "run `sem ingest` first");
  return read_panel(in, cfg.params);
}

std::string model_name(KeyKind k) { return "model_" + std::string(to_string(k)) + ".txt"; }

std::string tagged(const std::string& stage, KeyKind k) { return stage + "[" + std::string(to_string(k)) + "]: "; }

std::vector<int> ages_from(int a, int b) {
  std::vector<int> v;
  for (int t = a; t <= b; ++t) v.push_back(t);
  return v;
}

std::string predictions_name(const RunConfig& cfg, std::size_t i) {
  return i == 0 ? "predictions.tsv" : "predictions_delta" + fmt(cfg.deltas[i]) + ".tsv";
}

std::vector<CohortMortality> training_curves(const RunConfig& cfg, const CohortPanel& panel) {
  std::vector<CohortMortality> out;
  for (int c = cfg.first_cohort; c <= cfg.last_cohort; ++c) {
    if (!panel.contains(c)) throw Error(ErrorKind::data_gap, "training cohort " + std::to_string(c) + " missing from data");
    auto cm = truncate_to_year(panel.at(c), cfg.last_data_year);
    if (cm.w_avail() < cfg.params.terminal_age)
      throw Error(ErrorKind::data_gap, "training cohort " + std::to_string(c) + " observed only to age " +
                                           std::to_string(cm.w_avail()));
    out.push_back(std::move(cm));
  }
  return out;
}

}  // namespace

void run_ingest(const RunConfig& cfg, std::ostream& log) {
  CohortPanel panel;
  std::vector<std::string> inputs;
  if (cfg.synthetic) {
    const auto& sy = cfg.synth;
    const int last = sy.last_cohort > 0 ? sy.last_cohort : *std::max_element(cfg.targets.begin(), cfg.targets.end());
    SyntheticSpec spec;
    spec.kind = sy.family;
    spec.params = cfg.params;
    spec.first_cohort = cfg.first_cohort;
    spec.cohort_size = sy.cohort_size;
    spec.seed = cfg.seed;
    for (int c = cfg.first_cohort; c <= last; ++c) {
      const double k = c - cfg.first_cohort;
      spec.ig.push_back({sy.ig_a + sy.ig_a_slope * k, sy.ig_b + sy.ig_b_slope * k});
      spec.id.push_back({sy.id_alpha + sy.id_alpha_slope * k, sy.id_beta, sy.id_gamma, sy.id_change_point});
    }
    panel = generate_synthetic_panel(spec);
  } else {
    std::vector<LifeTableRow> rows;
    for (const auto& path : cfg.inputs) {
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::io, "cannot open input " + path.string());
      try {
        auto part = parse_cohort_lifetable(in);
        rows.insert(rows.end(), part.begin(), part.end());
      } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
      }
    }
    panel = build_panel(rows, cfg.params);
  }

  Outputs out(cfg);
  std::ostringstream body;
  write_panel(body, panel);
  out.write("mortality.tsv", body.str());
  out.manifest(cfg, "ingest", {});

  const auto cohorts = panel.cohorts();
  int lo = cfg.params.terminal_age, hi = 0;
  for (const auto& cm : panel.curves) {
    lo = std::min(lo, cm.w_avail());
    hi = std::max(hi, cm.w_avail());
  }
  log << "ingest: " << cohorts.size() << " cohorts " << cohorts.front() << "-" << cohorts.back()
      << (cfg.synthetic ? " (synthetic " + std::string(to_string(cfg.synth.family)) + ")" : "")
      << ", last age with data " << lo << "-" << hi << "\n";
}

void run_fit(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  const auto curves = training_curves(cfg, panel);
  const int m = static_cast<int>(curves.size());
  if (m < 2) throw Error(ErrorKind::validation, "fit: need m ≥ 2 training cohorts, got " + std::to_string(m));
  const auto& p = cfg.params;
  const auto basis = make_basis(p.cond_age, p.terminal_age, cfg.basis_size, cfg.order);
  Outputs out(cfg);

  for (KeyKind kind : cfg.kinds) {
    const std::string k(to_string(kind));
    std::vector<KeyPointEstimates> kps(curves.size());
    std::vector<CoeffFit> fits(curves.size());
    try {
      parallel_for(curves.size(), [&](std::size_t i) {
        kps[i] = estimate_keys(curves[i], kind, p);
        fits[i] = fit_coeffs(kps[i], basis);
      });
    } catch (const Error& e) {
      throw Error(e.kind(), tagged("fit", kind) + e.what());
    }

    Eigen::MatrixXd coeffs(m, basis.size());
    std::vector<int> cohorts;
    int capped = 0, flagged = 0, ridged = 0;
    for (int i = 0; i < m; ++i) {
      coeffs.row(i) = fits[static_cast<std::size_t>(i)].coeffs.transpose();
      cohorts.push_back(curves[static_cast<std::size_t>(i)].cohort);
      capped += static_cast<int>(kps[static_cast<std::size_t>(i)].capped_ages.size());
      flagged += static_cast<int>(kps[static_cast<std::size_t>(i)].monotonicity_flags.size());
      ridged += fits[static_cast<std::size_t>(i)].ridge_used;
    }
    const auto fds = center(basis, cohorts, coeffs);
    const auto model = fit_fpca(fds, cfg.theta, kind);

    std::ostringstream mf, keys, cf, eig, efun, sc, fq;
    write_model(mf, model);
    keys << "cohort\tage\tkey\n";
    for (const auto& kp : kps)
      for (std::size_t i = 0; i < kp.ages.size(); ++i) keys << kp.cohort << '\t' << kp.ages[i] << '\t' << fmt(kp.values[i]) << '\n';
    cf << "cohort\tl\talpha\n";
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < basis.size(); ++l) cf << cohorts[static_cast<std::size_t>(i)] << '\t' << l + 1 << '\t' << fmt(coeffs(i, l)) << '\n';
    eig << "component\teigval\tcontrib\n";
    for (int j = 0; j < model.rank(); ++j) eig << j + 1 << '\t' << fmt(model.eigvals[j]) << '\t' << fmt(model.contrib[j]) << '\n';
    efun << "age\tmean";
    for (int j = 0; j < model.rank(); ++j) efun << "\te" << j + 1;
    efun << '\n';
    for (int t = p.cond_age; t <= p.terminal_age; ++t) {
      efun << t << '\t' << fmt(basis.eval(model.mean_coeffs, t));
      for (int j = 0; j < model.rank(); ++j) efun << '\t' << fmt(basis.eval(model.eig_coeffs.col(j), t));
      efun << '\n';
    }
    sc << "cohort\tcomponent\tscore\n";
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < model.rank(); ++j) sc << cohorts[static_cast<std::size_t>(i)] << '\t' << j + 1 << '\t' << fmt(model.scores(i, j)) << '\n';

    // In-sample check: truncated expansion against the training data, q(t|S0).
    fq << "cohort\tmse\n";
    const auto eval_ages = ages_from(cfg.eval_age, p.terminal_age);
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      std::vector<double> z(static_cast<std::size_t>(model.k_selected));
      for (int j = 0; j < model.k_selected; ++j) z[static_cast<std::size_t>(j)] = model.scores(i, j);
      const auto pred = predicted_mortality(model, z, p, eval_ages, cfg.eval_age);
      const auto& cm = curves[static_cast<std::size_t>(i)];
      std::vector<double> data;
      for (int t : eval_ages) data.push_back(conditional(cm.q(t), cm.q(cfg.eval_age)));
      const double e = mse(pred.q, data, cfg.eval_age, p.terminal_age);
      worst = std::max(worst, e);
      fq << cm.cohort << '\t' << fmt(e) << '\n';
    }

    out.write(model_name(kind), mf.str());
    out.write("keys_" + k + ".tsv", keys.str());
    out.write("coeffs_" + k + ".tsv", cf.str());
    out.write("eigen_" + k + ".tsv", eig.str());
    out.write("eigenfunctions_" + k + ".tsv", efun.str());
    out.write("scores_" + k + ".tsv", sc.str());
    out.write("fit_quality_" + k + ".tsv", fq.str());

    char line[256];
    std::snprintf(line, sizeof line, "fit %s: m=%d rank=%d K_selected=%d (cumulative contribution %.6f)%s\n", k.c_str(), m,
                  model.rank(), model.k_selected, model.contrib[model.k_selected - 1],
                  model.degenerate ? " [degenerate: all eigenvalues zero]" : "");
    log << line;
    log << "  in-sample MSE of q(t|" << cfg.eval_age << ") at K_selected: max " << fmt(worst) << "\n";
    if (capped) log << "  " << capped << " age(s) at the conditional-mortality cap\n";
    if (flagged) log << "  " << flagged << " age(s) flagged non-monotone in the key estimate\n";
    if (ridged) log << "  ridge term used for " << ridged << " cohort(s)\n";
  }
  out.manifest(cfg, "fit", {"mortality.tsv"});
}

void run_forecast(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  const auto& p = cfg.params;
  Outputs out(cfg);
  std::vector<std::string> inputs{"mortality.tsv"};

  std::vector<double> all_deltas = cfg.deltas;
  all_deltas.push_back(0.8);
  all_deltas.push_back(0.95);
  std::sort(all_deltas.begin(), all_deltas.end());
  all_deltas.erase(std::unique(all_deltas.begin(), all_deltas.end(), [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                   all_deltas.end());
  std::vector<int> targets = cfg.targets;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  std::ostringstream arima, sf, ms, mod, notes;
  std::vector<std::ostringstream> preds(cfg.deltas.size());
  arima << "kind\tcomponent\tp\td\tq\tintercept\tsigma2\taicc\tfallback\tphi\ttheta\n";
  sf << "kind\tcomponent\tcohort\tpoint\tlo80\thi80\tlo95\thi95\n";
  ms << "kind\tcohort\tdelta\tcomponent\tpoint\tlower\tupper\tmodified\n";
  mod << "kind\tcohort\tdelta\tn_ages\tobjective_unmodified\tobjective_modified\n";
  for (auto& s : preds) s << "kind\tcohort\tage\tq_pred\tq_pred_modified\n";
  auto notice = [&](const std::string& msg) {
    notes << msg << '\n';
    log << "notice: " << msg << '\n';
  };

  for (KeyKind kind : cfg.kinds) {
    const std::string k(to_string(kind));
    auto in = open_input(cfg.output_dir / model_name(kind), "run `sem fit` first");
    const auto model = read_model(in);
    inputs.push_back(model_name(kind));
    if (model.kind != kind) throw Error(ErrorKind::validation, model_name(kind) + " holds a " + std::string(to_string(model.kind)) + " model");
    if (model.cohorts.front() != cfg.first_cohort || model.cohorts.back() != cfg.last_cohort)
      throw Error(ErrorKind::validation, tagged("forecast", kind) + "model cohorts do not match the config; rerun `sem fit`");
    const int cm_last = model.cohorts.back();
    const int horizon = targets.back() - cm_last;
    const auto kk = static_cast<std::size_t>(model.k_selected);

    std::vector<ArimaSpec> specs(kk);
    std::vector<ScoreForecast> fc(kk);
    try {
      parallel_for(kk, [&](std::size_t j) {
        std::vector<double> series(model.scores.rows());
        for (Eigen::Index i = 0; i < model.scores.rows(); ++i) series[static_cast<std::size_t>(i)] = model.scores(i, static_cast<Eigen::Index>(j));
        specs[j] = fit_arima(series, cfg.search);
        fc[j] = forecast(specs[j], series, horizon, all_deltas, static_cast<int>(j));
      });
    } catch (const Error& e) {
      throw Error(e.kind(), tagged("forecast", kind) + e.what());
    }

    for (std::size_t j = 0; j < kk; ++j) {
      const auto& s = specs[j];
      auto join = [](const std::vector<double>& v) {
        std::string r;
        for (double x : v) r += (r.empty() ? "" : ",") + fmt(x);
        return r.empty() ? std::string("-") : r;
      };
      arima << k << '\t' << j + 1 << '\t' << s.p << '\t' << s.d << '\t' << s.q << '\t'
            << (s.has_intercept ? fmt(s.intercept) : "NA") << '\t' << fmt(s.sigma2) << '\t' << fmt(s.aicc) << '\t'
            << (s.fallback ? "yes" : "no") << '\t' << join(s.phi) << '\t' << join(s.theta_ma) << '\n';
      if (s.fallback) notice(k + " component " + std::to_string(j + 1) + ": no admissible ARIMA candidate, random walk with drift used");
      const auto &i80 = fc[j].interval(0.8), &i95 = fc[j].interval(0.95);
      for (int h = 0; h < horizon; ++h) {
        const auto u = static_cast<std::size_t>(h);
        sf << k << '\t' << j + 1 << '\t' << cm_last + h + 1 << '\t' << fmt(fc[j].points[u]) << '\t' << fmt(i80.lower[u]) << '\t'
           << fmt(i80.upper[u]) << '\t' << fmt(i95.lower[u]) << '\t' << fmt(i95.upper[u]) << '\n';
      }
    }

    std::ostringstream kf;
    kf << "cohort\tage\tkey\tkey_modified\n";
    const auto eval_ages = ages_from(cfg.eval_age, p.terminal_age);
    const int max_mod = cm_last + p.terminal_age - p.cond_age;
    for (int c : targets) {
      const auto h = static_cast<std::size_t>(c - cm_last - 1);
      std::vector<double> point(kk);
      for (std::size_t j = 0; j < kk; ++j) point[j] = fc[j].points[h];
      const auto unmod = predicted_mortality(model, point, p, eval_ages, cfg.eval_age);
      if (!unmod.clamped_ages.empty())
        notice(k + " cohort " + std::to_string(c) + ": forecast key left the admissible domain at " +
               std::to_string(unmod.clamped_ages.size()) + " age(s); clamped");
      if (unmod.non_monotone) notice(k + " cohort " + std::to_string(c) + ": forecast mortality is not monotone in age");

      std::vector<std::optional<ModifiedKey>> mks(cfg.deltas.size());
      PartialData partial;
      bool have_partial = false;
      if (c > max_mod) {
        notice(k + " cohort " + std::to_string(c) + " is beyond c_m + w - S = " + std::to_string(max_mod) +
               ": unmodified forecast only");
      } else if (!panel.contains(c)) {
        notice(k + " cohort " + std::to_string(c) + ": no partial data; unmodified forecast only");
      } else {
        const auto cm = truncate_to_year(panel.at(c), cfg.last_data_year);
        if (cm.w_avail() >= p.cond_age) {
          const auto cond = conditional_data(cm, p.cond_age);
          partial.ages = ages_from(p.cond_age, cm.w_avail());
          partial.cond = cond;
          have_partial = true;
        }
      }
      for (std::size_t di = 0; di < cfg.deltas.size() && have_partial; ++di) {
        try {
          mks[di] = modify_scores(fc, model, c, cm_last, partial, p, cfg.deltas[di]);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::not_applicable) throw Error(e.kind(), tagged("forecast", kind) + e.what());
          notice(k + " cohort " + std::to_string(c) + ": " + e.what());
          break;
        }
      }
      if (have_partial && mks[0])
        log << "forecast " << k << " cohort " << c << ": modification fitted ages " << mks[0]->fit_ages.front() << "-"
            << mks[0]->fit_ages.back() << "\n";

      for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
        const auto box = score_box(fc, static_cast<int>(h) + 1, cfg.deltas[di], model.k_selected);
        std::optional<MortalityPrediction> mpred;
        if (mks[di]) {
          const auto& mk = *mks[di];
          mpred = predicted_mortality(model, mk.scores_tilde, p, eval_ages, cfg.eval_age);
          mod << k << '\t' << c << '\t' << fmt(cfg.deltas[di]) << '\t' << mk.fit_ages.size() << '\t' << fmt(mk.objective_at_point)
              << '\t' << fmt(mk.objective) << '\n';
        }
        for (std::size_t j = 0; j < kk; ++j)
          ms << k << '\t' << c << '\t' << fmt(cfg.deltas[di]) << '\t' << j + 1 << '\t' << fmt(box.point[j]) << '\t' << fmt(box.lower[j])
             << '\t' << fmt(box.upper[j]) << '\t' << (mks[di] ? fmt(mks[di]->scores_tilde[j]) : "NA") << '\n';
        for (std::size_t i = 0; i < eval_ages.size(); ++i)
          preds[di] << k << '\t' << c << '\t' << eval_ages[i] << '\t' << fmt(unmod.q[i]) << '\t' << (mpred ? fmt(mpred->q[i]) : "NA")
                    << '\n';
      }
      const auto key_point = model.curve_coeffs(point);
      const auto key_mod = mks[0] ? std::optional(model.curve_coeffs(mks[0]->scores_tilde)) : std::nullopt;
      for (int t = p.cond_age; t <= p.terminal_age; ++t)
        kf << c << '\t' << t << '\t' << fmt(model.basis.eval(key_point, t)) << '\t'
           << (key_mod ? fmt(model.basis.eval(*key_mod, t)) : "NA") << '\n';
    }
    out.write("key_forecast_" + k + ".tsv", kf.str());
  }

  out.write("arima.tsv", arima.str());
  out.write("score_forecast.tsv", sf.str());
  out.write("modified_scores.tsv", ms.str());
  out.write("modification.tsv", mod.str());
  for (std::size_t di = 0; di < cfg.deltas.size(); ++di) out.write(predictions_name(cfg, di), preds[di].str());
  out.write("notices.txt", notes.str());
  out.manifest(cfg, "forecast", inputs);
  log << "forecast: targets";
  for (int c : targets) log << ' ' << c;
  log << ", deltas";
  for (double d : cfg.deltas) log << ' ' << fmt(d);
  log << "\n";
}

void run_evaluate(const RunConfig& cfg, std::ostream& log) {
  const auto panel = load_panel(cfg);
  const auto& p = cfg.params;
  std::vector<MseReport> reports;
  std::vector<std::string> inputs{"mortality.tsv"};
  std::vector<std::string> notes;

  for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
    const auto name = predictions_name(cfg, di);
    auto in = open_input(cfg.output_dir / name, "run `sem forecast` first");
    inputs.push_back(name);
    struct Curve {
      std::map<int, double> unmod;
      std::map<int, double> mod;
    };
    std::map<std::pair<KeyKind, int>, Curve> curves;
    for (const auto& row : text::read_tsv(in, "kind\tcohort\tage\tq_pred\tq_pred_modified")) {
      if (row.fields.size() != 5) throw Error(ErrorKind::parse, name + " line " + std::to_string(row.line) + ": expected 5 fields");
      const auto kind = key_kind_from_string(row.fields[0]);
      const int c = text::parse_int(row.fields[1], "cohort");
      const int t = text::parse_int(row.fields[2], "age");
      auto& cv = curves[{kind, c}];
      cv.unmod[t] = text::parse_double(row.fields[3], "q_pred");
      if (row.fields[4] != "NA") cv.mod[t] = text::parse_double(row.fields[4], "q_pred_modified");
    }
    for (const auto& [key, cv] : curves) {
      const auto [kind, c] = key;
      if (!panel.contains(c)) {
        if (di == 0) notes.push_back("cohort " + std::to_string(c) + ": no data to evaluate against");
        continue;
      }
      const auto& data = panel.at(c);
      const int c_tilde = cfg.last_data_year - c;
      int lo = c_tilde + (cfg.mse_lower == MseLowerLimit::first_forecast ? 1 : 0);
      lo = std::max(lo, cfg.eval_age);
      const int hi = std::min(p.terminal_age, data.w_avail());
      if (lo > hi || data.w_avail() < cfg.eval_age) {
        if (di == 0) notes.push_back(std::string(to_string(kind)) + " cohort " + std::to_string(c) + ": no overlap between prediction and data ages");
        continue;
      }
      std::vector<double> obs;
      const double q0 = data.q(cfg.eval_age);
      for (int t = lo; t <= hi; ++t) obs.push_back(conditional(data.q(t), q0));
      auto collect = [&](const std::map<int, double>& m, std::vector<double>& v) {
        for (int t = lo; t <= hi; ++t) {
          const auto it = m.find(t);
          if (it == m.end()) return false;
          v.push_back(it->second);
        }
        return true;
      };
      const int n = hi - lo + 1;
      std::vector<double> pu, pm;
      if (di == 0 && collect(cv.unmod, pu)) reports.push_back({kind, c, "unmodified", mse(pu, obs, lo, hi), lo, hi, n});
      if (!cv.mod.empty() && collect(cv.mod, pm))
        reports.push_back({kind, c, modified_variant(cfg.deltas[di]), mse(pm, obs, lo, hi), lo, hi, n});
    }
  }
  for (const auto& n : notes) log << "notice: " << n << "\n";
  if (reports.empty()) throw Error(ErrorKind::validation, "evaluate: no overlap between predictions and data");

  const auto table = render_table(reports);
  std::ostringstream rep;
  rep << "kind\tcohort\tvariant\tmse\tage_from\tage_to\tn_ages\n";
  for (const auto& r : reports)
    rep << to_string(r.kind) << '\t' << r.cohort << '\t' << r.variant << '\t' << fmt(r.mse) << '\t' << r.age_from << '\t' << r.age_to
        << '\t' << r.n_ages << '\n';
  Outputs out(cfg);
  out.write("mse_table.tsv", table.tsv);
  out.write("mse_reports.tsv", rep.str());
  out.manifest(cfg, "evaluate", inputs);
  log << "MSE of q(t|" << cfg.eval_age << ") over ages c~.." << p.terminal_age << " (c~ = " << cfg.last_data_year << " - c)\n";
  log << table.text;
}

}  // namespace sem
