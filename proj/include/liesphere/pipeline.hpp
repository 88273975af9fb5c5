#pragma once
// Pipeline orchestration: each pipeline runs a battery of named checks and
// writes its artifacts under the output directory. report.json is fully
// deterministic for a fixed config; wall-clock times go to a sibling
// timing.json so reruns stay byte-identical.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "liesphere/config.hpp"
#include "liesphere/euclid.hpp"
#include "liesphere/frame.hpp"
#include "liesphere/io.hpp"
#include "liesphere/potentials.hpp"
#include "liesphere/spectral.hpp"
#include "liesphere/surface.hpp"
#include "liesphere/wilczynski.hpp"

namespace liesphere::cli {

using ordered_json = nlohmann::ordered_json;

struct CheckResult {
  std::string name;
  double max_residual = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0;
  bool pass = false;
  std::string error;
};

struct PipelineReport {
  Pipeline pipeline{};
  ordered_json metadata = ordered_json::object();
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;
  double seconds = 0;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct RunReport {
  std::vector<PipelineReport> pipelines;

  bool pass() const {
    for (const auto& p : pipelines)
      if (!p.pass()) return false;
    return true;
  }
};

// chart-pole filter for the round-trip metric comparison: a node is used
// when the stride-1 and stride-2 stencils agree to this tolerance and its
// 9x9 neighborhood reconstructed without degeneracies
inline constexpr double kChartFilterTol = 1.5e-3;
inline constexpr int kChartFilterMargin = 4;
inline constexpr double kChartUsedFraction = 0.6;

namespace detail {

inline double tol_for(const RunConfig& c, const std::string& name, double def) {
  const auto it = c.tolerances.find(name);
  return it == c.tolerances.end() ? def : it->second;
}

template <class F>
void run_check(PipelineReport& rep, const RunConfig& c, const std::string& name,
               double default_tol, F&& eval) {
  CheckResult r;
  r.name = name;
  r.tolerance = tol_for(c, name, default_tol);
  try {
    r.max_residual = eval();
    r.pass = r.max_residual <= r.tolerance;
  } catch (const Error& e) {
    r.error = e.what();
    r.pass = false;
  }
  rep.checks.push_back(std::move(r));
}

inline void grid_metadata(PipelineReport& rep, const GridSpec& g, double h) {
  rep.metadata["grid"] = {g.n1, g.n2};
  rep.metadata["domain"] = {g.r1(0), g.r1(g.n1 - 1), g.r2(0), g.r2(g.n2 - 1)};
  rep.metadata["h"] = h;
}

inline std::string artifact_path(Pipeline p, const std::string& file) {
  return std::string(pipeline_name(p)) + "/" + file;
}

inline void write_artifact_csv(PipelineReport& rep, const std::filesystem::path& out,
                               const std::string& file,
                               const std::vector<std::string>& header,
                               const std::vector<std::vector<double>>& rows) {
  const std::string rel = artifact_path(rep.pipeline, file);
  io::write_csv(out / rel, header, rows);
  rep.artifacts.push_back(rel);
}

// the compatible projective field driven by the wilczynski pipeline:
// beta = r1, gamma = r2, V = W = (r1^2 + r2^2)/2
inline wilczynski::ProjectivePotentials projective_test_field(const Rect& domain) {
  wilczynski::ProjectivePotentials P;
  P.beta = Field2::separable(Fn1::identity(), Fn1::constant(1));
  P.gamma = Field2::separable(Fn1::constant(1), Fn1::identity());
  const Field2 half_sq([](double x, double y) {
    const auto X = FieldJet::var1(x);
    const auto Y = FieldJet::var2(y);
    return 0.5 * (X * X + Y * Y);
  });
  P.V = half_sq;
  P.W = half_sq;
  P.domain = domain;
  return P;
}

inline Rect centered_sub_rect(const Rect& r, double fraction) {
  const double c1 = 0.5 * (r.r1min + r.r1max), c2 = 0.5 * (r.r2min + r.r2max);
  const double h1 = 0.5 * fraction * r.span1(), h2 = 0.5 * fraction * r.span2();
  return {c1 - h1, c1 + h1, c2 - h2, c2 + h2};
}

}  // namespace detail

inline euclid::EuclidSurface build_surface(const EuclidConfig& e) {
  const auto& p = e.params;
  if (e.kind == "ellipsoid") return euclid::ellipsoid(p[0], p[1], p[2]);
  if (e.kind == "spheroid") return euclid::spheroid(p[0], p[1]);
  if (e.kind == "torus") return euclid::torus(p[0], p[1]);
  if (e.kind == "cyclide") return euclid::ring_cyclide(p[0], p[1], p[2]);
  return euclid::cylinder(p[0]);
}

inline PipelineReport run_check_gc(const RunConfig& c, const std::filesystem::path& out) {
  PipelineReport rep;
  rep.pipeline = Pipeline::check_gc;
  const auto fam = build_family(c);
  const GridSpec g = GridSpec::over(c.domain, c.n1, c.n2);
  detail::grid_metadata(rep, g, c.h);
  rep.metadata["family"] = fam.kind;

  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<size_t>(g.count()));
  double worst = 0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const auto res = potentials::gauss_codazzi_residual(fam.field, g.r1(i), g.r2(j));
      for (double v : res) worst = std::max(worst, std::abs(v));
      rows.push_back({g.r1(i), g.r2(j), res[0], res[1], res[2]});
    }
  detail::run_check(rep, c, "gc-residual", kTolGcAnalytic, [&] { return worst; });
  detail::write_artifact_csv(rep, out, "residuals.csv", {"r1", "r2", "res1", "res2", "res3"},
                             rows);
  return rep;
}

inline PipelineReport run_integrate(const RunConfig& c, const std::filesystem::path& out) {
  PipelineReport rep;
  rep.pipeline = Pipeline::integrate;
  const auto fam = build_family(c);
  const GridSpec g = GridSpec::over(c.domain, c.n1, c.n2);
  detail::grid_metadata(rep, g, c.h);
  rep.metadata["family"] = fam.kind;

  const auto frames = frame::integrate_grid(fam.field, g, c.h);
  const auto target = frame::gram_target();
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<size_t>(g.count()));
  double gram_drift = 0, det_drift = 0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const auto F = frame::FrameState::from_rows({g.r1(i), g.r2(j)}, frames.at(i, j));
      const double gd = algebra::max_abs(frame::gram_matrix(F) - target);
      const double dd = std::abs(frame::frame_det(F) - cd(1, 0));
      gram_drift = std::max(gram_drift, gd);
      det_drift = std::max(det_drift, dd);
      rows.push_back({g.r1(i), g.r2(j), gd, dd});
    }
  const double drift_tol = kTolDriftPerUnit * std::max(1.0, c.domain.span1() + c.domain.span2());
  detail::run_check(rep, c, "gram-drift", drift_tol, [&] { return gram_drift; });
  detail::run_check(rep, c, "det-drift", drift_tol, [&] { return det_drift; });
  detail::run_check(rep, c, "holonomy", 1e-7, [&] {
    return frame::holonomy_defect(fam.field, detail::centered_sub_rect(c.domain, 0.5), c.h);
  });
  detail::write_artifact_csv(rep, out, "drift.csv", {"r1", "r2", "gram", "det"}, rows);
  return rep;
}

inline PipelineReport run_surface(const RunConfig& c, const std::filesystem::path& out) {
  PipelineReport rep;
  rep.pipeline = Pipeline::surface;
  const auto fam = build_family(c);
  const GridSpec g = GridSpec::over(c.domain, c.n1, c.n2);
  detail::grid_metadata(rep, g, c.h);
  rep.metadata["family"] = fam.kind;

  const auto frames = frame::integrate_grid(fam.field, g, c.h);

  detail::run_check(rep, c, "theorem1", kTolThmFd, [&] {
    const auto t1 = surface::theorem1_check(fam.field, frames);
    double worst = 0;
    for (double v : t1.residual) worst = std::max(worst, v);
    return worst;
  });
  if (fam.field.canal)
    detail::run_check(rep, c, "canal-dv2", kTolThmFd, [&] {
      return surface::theorem1_check(fam.field, frames).canal_dv2;
    });

  detail::run_check(rep, c, "lie6", kTolDiracAnalytic, [&] {
    Grid<frame::LieFrame6> L(g);
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i)
        L.at(i, j) = frame::frame_to_lie6(
            frame::FrameState::from_rows({g.r1(i), g.r2(j)}, frames.at(i, j)));
    return frame::lie6_residual(fam.field, L);
  });

  if (fam.c0) {
    const auto ops = spectral::c0_operators(*fam.c0);
    auto eigen_worst = [&](const auto& op, double value) {
      double worst = 0;
      for (int col = 0; col < 4; ++col) {
        const CGrid u = spectral::frame_component(frames, 0, col);
        worst = std::max(worst, spectral::eigen_residual(op, u, value));
      }
      return worst;
    };
    detail::run_check(rep, c, "eigen-h", 1e-4, [&] { return eigen_worst(ops.H, ops.lambda); });
    detail::run_check(rep, c, "eigen-f", 1e-4, [&] { return eigen_worst(ops.F, ops.mu); });
  }
  if (fam.c1)
    detail::run_check(rep, c, "magnetic-identity", 1e-5, [&] {
      return spectral::magnetic_identity_check(*fam.c1, g);
    });

  const auto rec = surface::reconstruct_grid(frames);
  rep.metadata["degenerate"] = rec.degenerate;
  const std::string mesh_rel = detail::artifact_path(rep.pipeline, "mesh.obj");
  const auto stats = io::emit_mesh(rec, out / mesh_rel);
  rep.artifacts.push_back(mesh_rel);
  rep.metadata["vertices"] = stats.vertices;
  rep.metadata["triangles"] = stats.triangles;

  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<size_t>(g.count()));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const bool ok = rec.status.at(i, j) == surface::SampleStatus::ok;
      const auto& s = rec.samples.at(i, j);
      rows.push_back({g.r1(i), g.r2(j), static_cast<double>(rec.status.at(i, j)),
                      ok ? s.r.x : nan, ok ? s.r.y : nan, ok ? s.r.z : nan,
                      ok ? s.w1 : nan, ok ? s.w2 : nan});
    }
  detail::write_artifact_csv(rep, out, "samples.csv",
                             {"r1", "r2", "status", "x", "y", "z", "w1", "w2"}, rows);
  return rep;
}

inline PipelineReport run_landau(const RunConfig& c, const std::filesystem::path& out) {
  PipelineReport rep;
  rep.pipeline = Pipeline::landau;
  const LandauConfig& L = c.landau;
  const GridSpec g = GridSpec::over(L.window, L.n1, L.n2);
  detail::grid_metadata(rep, g, c.h);
  rep.metadata["lambda"] = L.lambda;
  rep.metadata["k"] = L.k;
  rep.metadata["M"] = L.M;
  rep.metadata["basis"] = L.closed_form ? "closed-form" : "integrated";

  const double yreach = std::max({std::abs(L.ymin), std::abs(L.ymax), std::abs(g.r1(0)),
                                  std::abs(g.r1(g.n1 - 1))}) +
                        std::abs(L.k) + 0.5;
  const auto basis = spectral::landau_basis(L.lambda, L.closed_form, yreach);

  std::vector<double> ys(static_cast<size_t>(L.samples));
  for (int i = 0; i < L.samples; ++i)
    ys[static_cast<size_t>(i)] = L.ymin + (L.ymax - L.ymin) * i / (L.samples - 1);

  detail::run_check(rep, c, "wronskian", 1e-9, [&] {
    double worst = 0;
    for (double y : ys) worst = std::max(worst, std::abs(basis.wronskian(y) - 1.0));
    return worst;
  });

  if (L.lambda == 0.5) {
    const double I = spectral::detail::integrate(
        [](double t) { return std::exp(t * t); }, 0.0, L.k);
    detail::run_check(rep, c, "z0", 1e-8, [&] {
      const auto pt = spectral::landau_profile_point(basis, L.k, 0.0);
      return std::abs(pt.z - (-L.k / I - I / (4 * L.k)));
    });
    detail::run_check(rep, c, "r0", 1e-8, [&] {
      const auto pt = spectral::landau_profile_point(basis, L.k, 0.0);
      return std::abs(pt.radius - (-L.k / I + I / (4 * L.k)));
    });
  }

  detail::run_check(rep, c, "lie-quadric", 1e-10, [&] {
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const double y = L.ymin + (L.ymax - L.ymin) * i / 99.0;
      worst = std::max(worst,
                       std::abs(surface::quadric_residual(spectral::landau_hex(basis, L.k, y))));
    }
    return worst;
  });

  std::optional<spectral::LandauCheck> opcheck;
  auto operators = [&]() -> const spectral::LandauCheck& {
    if (!opcheck) opcheck = spectral::landau_operator_check(L.M, L.k, L.lambda, g, L.closed_form);
    return *opcheck;
  };
  detail::run_check(rep, c, "eigen-h", 1e-4, [&] { return operators().res_h; });
  detail::run_check(rep, c, "eigen-f", 1e-4, [&] { return operators().res_f; });

  const auto profile = spectral::landau_surface(basis, L.k, ys);
  rep.metadata["profile-samples"] = L.samples;
  rep.metadata["profile-poles"] = profile.pole_count;
  const std::string rel = detail::artifact_path(rep.pipeline, "profile.csv");
  io::write_profile_csv(out / rel, profile);
  rep.artifacts.push_back(rel);
  return rep;
}

inline PipelineReport run_euclid_roundtrip(const RunConfig& c,
                                           const std::filesystem::path& out) {
  PipelineReport rep;
  rep.pipeline = Pipeline::euclid_roundtrip;
  const EuclidConfig& e = c.euclid;
  const GridSpec g = GridSpec::over(e.domain, e.n1, e.n2);
  detail::grid_metadata(rep, g, e.h);
  rep.metadata["surface"] = e.kind;
  rep.metadata["extract-grid"] = {e.extract_n1, e.extract_n2};
  rep.metadata["extract-domain"] = {e.extract_domain.r1min, e.extract_domain.r1max,
                                    e.extract_domain.r2min, e.extract_domain.r2max};

  const auto surf = build_surface(e);
  const auto fd_pot = euclid::extract_potentials_fd(
      surf, GridSpec::over(e.extract_domain, e.extract_n1, e.extract_n2));
  const auto frames = frame::integrate_grid(fd_pot, g, e.h);
  const auto rec = surface::reconstruct_grid(frames);
  rep.metadata["degenerate"] = rec.degenerate;

  RGrid w1(g), w2(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      w1.at(i, j) = rec.samples.at(i, j).w1;
      w2.at(i, j) = rec.samples.at(i, j).w2;
    }
  const auto an_pot = euclid::extract_potentials(surf);
  auto metric_at = [&](int i, int j, int stride) {
    const double d1 = (-w1.at(i + 2 * stride, j) + 8 * w1.at(i + stride, j) -
                       8 * w1.at(i - stride, j) + w1.at(i - 2 * stride, j)) /
                      (12 * stride * g.h1);
    const double d2 = (-w2.at(i, j + 2 * stride) + 8 * w2.at(i, j + stride) -
                       8 * w2.at(i, j - stride) + w2.at(i, j - 2 * stride)) /
                      (12 * stride * g.h2);
    const double dw = w1.at(i, j) - w2.at(i, j);
    return d1 * d2 / (dw * dw);
  };

  const int m = kChartFilterMargin;
  int used = 0, window = 0;
  double worst = 0;
  std::vector<std::vector<double>> rows;
  for (int j = m; j < g.n2 - m; ++j)
    for (int i = m; i < g.n1 - m; ++i) {
      ++window;
      bool regular = true;
      for (int oi = -m; oi <= m && regular; ++oi)
        for (int oj = -m; oj <= m && regular; ++oj)
          regular = rec.status.at(i + oi, j + oj) == surface::SampleStatus::ok;
      if (!regular) continue;
      const double fd = metric_at(i, j, 1);
      if (std::abs(fd - metric_at(i, j, 2)) > kChartFilterTol) continue;
      ++used;
      const double direct = -an_pot.p(g.r1(i), g.r2(j)) * an_pot.q(g.r1(i), g.r2(j));
      worst = std::max(worst, std::abs(fd - direct));
      rows.push_back({g.r1(i), g.r2(j), fd, direct});
    }
  rep.metadata["window-nodes"] = window;
  rep.metadata["used-nodes"] = used;
  detail::run_check(rep, c, "metric-roundtrip", 1e-4, [&] {
    if (used < static_cast<int>(kChartUsedFraction * window))
      throw ValidationError("chart filter excluded too many nodes (" + std::to_string(used) +
                            " of " + std::to_string(window) + " usable)");
    return worst;
  });

  const std::string mesh_rel = detail::artifact_path(rep.pipeline, "mesh.obj");
  const auto stats = io::emit_mesh(rec, out / mesh_rel);
  rep.artifacts.push_back(mesh_rel);
  rep.metadata["vertices"] = stats.vertices;
  rep.metadata["triangles"] = stats.triangles;
  detail::write_artifact_csv(rep, out, "metric.csv", {"r1", "r2", "fd", "direct"}, rows);
  return rep;
}

inline PipelineReport run_wilczynski(const RunConfig& c, const std::filesystem::path& out) {
  PipelineReport rep;
  rep.pipeline = Pipeline::wilczynski;
  const WilczynskiConfig& w = c.wilczynski;
  const GridSpec g = GridSpec::over(w.window, w.n1, w.n2);
  detail::grid_metadata(rep, g, w.h);
  rep.metadata["field"] = "beta=r1, gamma=r2, V=W=(r1^2+r2^2)/2";

  const auto P = detail::projective_test_field(w.domain);

  detail::run_check(rep, c, "gc-residual", kTolGcAnalytic, [&] {
    double worst = 0;
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const auto res = wilczynski::proj_gc_residual(P, g.r1(i), g.r2(j));
        for (double v : res) worst = std::max(worst, std::abs(v));
      }
    return worst;
  });

  const auto frames = wilczynski::integrate_projective_grid(P, g, w.h);
  const auto chk = wilczynski::plucker_system_check(P, frames);
  detail::run_check(rep, c, "table", 1e-10, [&] { return chk.table; });
  detail::run_check(rep, c, "plucker-system", 1e-6, [&] { return chk.residual; });
  detail::run_check(rep, c, "laplace", 1e-6, [&] { return chk.laplace; });
  detail::run_check(rep, c, "holonomy", 1e-9, [&] {
    return wilczynski::projective_holonomy_defect(P, detail::centered_sub_rect(w.window, 0.8),
                                                  w.h);
  });

  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<size_t>(g.count()));
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const auto& m = frames.at(i, j);
      rows.push_back({g.r1(i), g.r2(j), m[0][0], m[0][1], m[0][2], m[0][3]});
    }
  detail::write_artifact_csv(rep, out, "tetrad.csv", {"r1", "r2", "v0", "v1", "v2", "v3"},
                             rows);
  return rep;
}

inline PipelineReport run_pipeline(Pipeline p, const RunConfig& c,
                                   const std::filesystem::path& out) {
  try {
    switch (p) {
      case Pipeline::check_gc: return run_check_gc(c, out);
      case Pipeline::integrate: return run_integrate(c, out);
      case Pipeline::surface: return run_surface(c, out);
      case Pipeline::landau: return run_landau(c, out);
      case Pipeline::euclid_roundtrip: return run_euclid_roundtrip(c, out);
      case Pipeline::wilczynski: return run_wilczynski(c, out);
    }
    throw ValidationError("unknown pipeline");
  } catch (const IoError&) {
    throw;  // output failures abort the run
  } catch (const Error& e) {
    // a module refused the configured inputs before any check could run;
    // the report carries the error verbatim
    PipelineReport rep;
    rep.pipeline = p;
    CheckResult r;
    r.name = "setup";
    r.tolerance = 0;
    r.pass = false;
    r.error = e.what();
    rep.checks.push_back(std::move(r));
    return rep;
  }
}

inline ordered_json report_json(const RunReport& rep) {
  ordered_json doc;
  doc["schema"] = 1;
  doc["pass"] = rep.pass();
  auto& pipes = doc["pipelines"] = ordered_json::array();
  for (const auto& p : rep.pipelines) {
    ordered_json pj;
    pj["pipeline"] = pipeline_name(p.pipeline);
    pj["pass"] = p.pass();
    pj["metadata"] = p.metadata;
    auto& checks = pj["checks"] = ordered_json::array();
    for (const auto& c : p.checks) {
      ordered_json cj;
      cj["name"] = c.name;
      cj["max_residual"] = c.max_residual;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      cj["error"] = c.error;
      checks.push_back(std::move(cj));
    }
    pj["artifacts"] = p.artifacts;
    pipes.push_back(std::move(pj));
  }
  return doc;
}

inline ordered_json timing_json(const RunReport& rep) {
  ordered_json doc;
  double total = 0;
  auto& pipes = doc["pipelines"] = ordered_json::array();
  for (const auto& p : rep.pipelines) {
    total += p.seconds;
    pipes.push_back({{"pipeline", pipeline_name(p.pipeline)}, {"seconds", p.seconds}});
  }
  doc["total_seconds"] = total;
  return doc;
}

inline RunReport run(const RunConfig& c, const std::filesystem::path& out) {
  if (c.pipelines.empty())
    throw ValidationError("config: empty pipeline list — nothing to run");
  RunReport rep;
  for (Pipeline p : c.pipelines) {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineReport pr = run_pipeline(p, c, out);
    pr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.pipelines.push_back(std::move(pr));
  }
  io::write_text_file(out / "report.json", report_json(rep).dump(2) + "\n");
  io::write_text_file(out / "timing.json", timing_json(rep).dump(2) + "\n");
  return rep;
}

}  // namespace liesphere::cli
