#include "xtal/decomp.hpp"
#include "xtal/embed.hpp"
#include "xtal/energy.hpp"
#include "xtal/io.hpp"
#include "xtal/lattice.hpp"
#include "xtal/paths.hpp"
#include "xtal/potential.hpp"
#include "xtal/relax.hpp"
#include "xtal/topology.hpp"
#include "xtal/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

using namespace xtal;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitError = 1;
constexpr int kExitUsage = 64;

struct Globals {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  Real alpha = 0.05;
  std::string potential;
  std::string out;
  std::uint64_t seed = 0;
};

struct Loaded {
  PotentialPair v;
  PotentialTriple psi;
  nlohmann::json json;
};

Loaded load_potential(const Globals& g) {
  Loaded l;
  if (g.potential.empty()) {
    l.v = tune_equilibrium(build_canonical_pair(g.alpha)).pair;
    l.psi = build_canonical_triple(g.alpha);
  } else {
    l.json = nlohmann::json::parse(read_text_file(g.potential));
    l.v = pair_from_json(l.json);
    l.psi = triple_from_json(l.json);
  }
  if (l.json.is_null()) l.json = to_json(l.v, &l.psi);
  return l;
}

// Prints to stdout, or writes the file plus its manifest when --out is set.
void emit(const Globals& g, const std::string& command, const nlohmann::json& params, const std::string& text,
          const nlohmann::json& potential = nullptr) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  write_text_file(g.out, text);
  write_manifest(g.out, make_manifest(command, params, potential, g.seed));
}

Vec3i parse_site(const std::string& s) {
  Vec3i w;
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  if (!(in >> w[0] >> w[1] >> w[2])) throw DomainError("expected three integers, got '" + s + "'");
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crystallization tools for fcc/hcp particle configurations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();
  app.add_option("--alpha", g.alpha, "Localization parameter")->capture_default_str();
  app.add_option("--potential", g.potential, "Potential JSON (default: canonical, tuned)");
  app.add_option("--out", g.out, "Write output to this file (a manifest is written beside it)");
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();

  int exit_code = 0;
  std::function<void()> action;

  // lattice
  auto* lattice = app.add_subcommand("lattice", "Lattice generation")->require_subcommand(1);
  std::string kind = "fcc";
  Real radius = 3.0, rmax = 1.8;
  bool as_json = false;
  auto* lgen = lattice->add_subcommand("gen", "Sites of a closed ball as XYZ");
  lgen->add_option("--kind", kind)->capture_default_str();
  lgen->add_option("--radius", radius)->capture_default_str();
  lgen->callback([&] {
    action = [&] {
      const Configuration c = lattice_ball(parse_lattice_kind(kind), radius);
      emit(g, "lattice gen", {{"kind", kind}, {"radius", radius}}, xyz_string(c));
    };
  });
  auto* lshells = lattice->add_subcommand("shells", "Distance shells around a site");
  lshells->add_option("--kind", kind)->capture_default_str();
  lshells->add_option("--rmax", rmax)->capture_default_str();
  lshells->add_flag("--json", as_json, "JSON output");
  lshells->callback([&] {
    action = [&] {
      const auto sh = shells(parse_lattice_kind(kind), rmax);
      std::string text;
      if (as_json) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& s : sh) j[format_real(s.radius)] = s.count;
        text = dump_json(j) + "\n";
      } else {
        for (const auto& s : sh) text += format_real(s.radius) + " " + std::to_string(s.count) + "\n";
      }
      emit(g, "lattice shells", {{"kind", kind}, {"rmax", rmax}}, text);
    };
  });

  // potential
  auto* potential = app.add_subcommand("potential", "Potential construction and checks")->require_subcommand(1);
  bool tune = false;
  auto* pbuild = potential->add_subcommand("build", "Canonical potential as JSON");
  pbuild->add_flag("--tune", tune, "Tune the tail so that the renormalized slope at 1 vanishes");
  pbuild->callback([&] {
    action = [&] {
      PotentialPair v = build_canonical_pair(g.alpha);
      if (tune) v = tune_equilibrium(v).pair;
      const PotentialTriple psi = build_canonical_triple(g.alpha);
      emit(g, "potential build", {{"alpha", g.alpha}, {"tune", tune}}, dump_json(to_json(v, &psi)) + "\n");
    };
  });
  auto validation_json = [](const ValidationReport& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : r.entries)
      j.push_back({{"condition", e.condition},
                   {"status", to_string(e.status)},
                   {"margin", e.margin},
                   {"worst_location", e.worst_location}});
    return j;
  };
  auto* pvalidate = potential->add_subcommand("validate", "Check the admissibility conditions");
  pvalidate->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const ValidationReport r = validate(l.v, l.psi);
      const ValidationReport d = derived_bounds(l.v);
      nlohmann::json j = {{"ok", r.ok()}, {"conditions", validation_json(r)}, {"derived", validation_json(d)}};
      emit(g, "potential validate", {{"alpha", g.alpha}}, dump_json(j) + "\n", l.json);
      if (!r.ok()) exit_code = kExitValidation;
    };
  });
  Real tune_tol = 1e-12;
  auto* ptune = potential->add_subcommand("tune", "Tune the tail amplitude");
  ptune->add_option("--tol", tune_tol)->capture_default_str();
  ptune->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const TuningResult t = tune_equilibrium(l.v, 0.0, 0.0, tune_tol);
      nlohmann::json j = to_json(t.pair, &l.psi);
      j["tuning"] = {{"residual", t.residual}, {"iterations", t.iterations}, {"broken", t.broken}};
      emit(g, "potential tune", {{"tol", tune_tol}}, dump_json(j) + "\n", l.json);
      if (!t.broken.empty()) exit_code = kExitValidation;
    };
  });

  // energy
  std::string input;
  bool per_particle = false;
  auto* en = app.add_subcommand("energy", "Energy evaluation")->require_subcommand(1);
  auto* eeval = en->add_subcommand("eval", "Energy of an XYZ configuration");
  eeval->add_option("--input", input, "Extended XYZ file")->required();
  eeval->add_flag("--per-particle", per_particle, "Include per-particle energies");
  eeval->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const Configuration c = read_xyz_file(input);
      const EnergyBreakdown e = energy(c, l.v, l.psi);
      nlohmann::json j = {{"n", c.size()},
                          {"total", e.total},
                          {"pair_sum", e.pair_sum},
                          {"triple_sum", e.triple_sum},
                          {"tail_bound", e.tail_bound},
                          {"min_distance", min_pair_distance(c)}};
      if (c.periodic()) j["periodic"] = {{"per_particle", e.total / static_cast<Real>(c.size())},
                                         {"relative", e.total / static_cast<Real>(c.size()) - efcc(l.v, l.psi, 1.0)}};
      if (per_particle) j["per_particle"] = e.per_particle;
      emit(g, "energy eval", {{"input", input}}, dump_json(j) + "\n", l.json);
    };
  });

  // classify
  std::string csv_out, xyz_out;
  auto* cl = app.add_subcommand("classify", "Local structure classification")->require_subcommand(1);
  auto* crun = cl->add_subcommand("run", "Classify every particle");
  crun->add_option("--input", input, "Extended XYZ file")->required();
  crun->add_option("--csv", csv_out, "Per-site CSV output");
  crun->add_option("--xyz", xyz_out, "XYZ output with a class column");
  crun->callback([&] {
    action = [&] {
      const Configuration c = read_xyz_file(input);
      const BondGraph bg = bond_graph(c, g.alpha);
      const SiteClassification s = classify(c, bg);
      if (!csv_out.empty()) write_text_file(csv_out, classification_csv(s, bg));
      if (!xyz_out.empty()) write_text_file(xyz_out, classification_xyz(c, s));
      emit(g, "classify run", {{"input", input}, {"alpha", g.alpha}}, dump_json(to_json(s)) + "\n");
    };
  });

  // embed
  int seed_particle = 0;
  Real embed_r = 1.0;
  auto* em = app.add_subcommand("embed", "Reference configurations")->require_subcommand(1);
  auto* egrow = em->add_subcommand("grow", "Grow a reference configuration around a regular particle");
  egrow->add_option("--input", input, "Extended XYZ file")->required();
  egrow->add_option("--particle", seed_particle, "Seed particle index")->capture_default_str();
  egrow->add_option("--r", embed_r, "Radius parameter r")->capture_default_str();
  egrow->callback([&] {
    action = [&] {
      const Configuration c = read_xyz_file(input);
      const BondGraph bg = bond_graph(c, g.alpha);
      const SiteClassification s = classify(c, bg);
      const ReferenceConfiguration ref = grow_reference(c, bg, s, seed_particle, embed_r);
      nlohmann::json j = {{"reference", to_json(ref)},
                          {"mapped", ref.mapped_count()},
                          {"complete", ref.complete()},
                          {"bond_violations", bond_violations(ref, bg, c)}};
      if (ref.mapped_count() > 0) {
        try {
          j["rigidity"] = to_json(rigidity_report(ref, g.seed));
        } catch (const DomainError&) {
          j["rigidity"] = nullptr;
        }
      }
      emit(g, "embed grow", {{"input", input}, {"particle", seed_particle}, {"r", embed_r}}, dump_json(j) + "\n");
      if (!ref.precondition_ok) exit_code = kExitValidation;
    };
  });

  // paths
  std::string site;
  Real lambda = 0.0, cap = 4.0;
  int basis_index = 0, column = 0;
  auto* pa = app.add_subcommand("paths", "Reference paths")->require_subcommand(1);
  auto* penum = pa->add_subcommand("enumerate", "Paths from the origin as JSON lines");
  penum->add_option("--k", site, "Endpoint in scaled coordinates, e.g. 2,2,0");
  penum->add_option("--lambda", lambda, "All endpoints at this distance");
  penum->add_option("--cap", cap, "Enumeration radius cap")->capture_default_str();
  penum->callback([&] {
    action = [&] {
      if (site.empty() == (lambda <= 0.0)) throw CLI::ValidationError("exactly one of --k and --lambda is required");
      const auto paths = site.empty() ? enumerate_paths(lambda, cap) : enumerate_paths(parse_site(site), cap);
      emit(g, "paths enumerate", {{"k", site}, {"lambda", lambda}, {"cap", cap}}, paths_jsonl(paths));
    };
  });
  auto* plemma = pa->add_subcommand("check-lemma-lambda", "Σ a_k(v,B)(k·v) against m(λ)λ²/3");
  plemma->add_option("--lambda", lambda)->required();
  plemma->add_option("--basis", basis_index, "Index into the ordered-basis list")->capture_default_str();
  plemma->add_option("--column", column, "Column of the basis used as v")->capture_default_str();
  plemma->callback([&] {
    action = [&] {
      const auto& bases = enumerate_bases();
      if (basis_index < 0 || static_cast<std::size_t>(basis_index) >= bases.size())
        throw DomainError("basis index out of range");
      const auto r = lemma_lambda_check(lambda, bases[static_cast<std::size_t>(basis_index)], column);
      const bool ok = std::abs(r.lhs - r.rhs) <= 1e-9;
      emit(g, "paths check-lemma-lambda", {{"lambda", lambda}, {"basis", basis_index}, {"column", column}},
           dump_json({{"lhs", r.lhs}, {"rhs", r.rhs}, {"m", r.m}, {"ok", ok}}) + "\n");
      if (!ok) exit_code = kExitValidation;
    };
  });
  auto* pnorm = pa->add_subcommand("check-normalization", "Σ M(µ) over the paths 0 -> k");
  pnorm->add_option("--k", site, "Endpoint in scaled coordinates")->required();
  pnorm->add_option("--cap", cap)->capture_default_str();
  pnorm->callback([&] {
    action = [&] {
      const auto r = normalization_check(parse_site(site), cap);
      const bool ok = !r.generic || std::abs(r.sum - 1.0) <= 1e-12;
      emit(g, "paths check-normalization", {{"k", site}},
           dump_json({{"sum", r.sum}, {"generic", r.generic}, {"paths", r.paths}, {"ok", ok}}) + "\n");
      if (!ok) exit_code = kExitValidation;
    };
  });

  // decompose
  auto* de = app.add_subcommand("decompose", "Energy decomposition")->require_subcommand(1);
  auto* drun = de->add_subcommand("run", "Structural / elastic / defect split");
  drun->add_option("--input", input, "Extended XYZ file")->required();
  drun->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const Configuration c = read_xyz_file(input);
      const BondGraph bg = bond_graph(c, g.alpha);
      const SiteClassification s = classify(c, bg);
      const PairSets ps = pair_sets(c, bg, s, l.v);
      const DecompositionReport r = decompose(c, l.v, l.psi, s, ps);
      nlohmann::json j = to_json(r);
      nlohmann::json card = nlohmann::json::array();
      for (const auto& row : cardinality_report(ps, s))
        card.push_back({{"lambda", row.lambda}, {"expected", row.expected}, {"count", row.count}, {"gap", row.gap},
                        {"constant", row.constant}});
      j["cardinality"] = card;
      j["pair_sets"] = to_json(ps);
      emit(g, "decompose run", {{"input", input}, {"alpha", g.alpha}}, dump_json(j) + "\n", l.json);
      if (r.closure_error > 1e-8) exit_code = kExitValidation;
    };
  });
  auto* dfine = de->add_subcommand("finebound", "Fine-bound report");
  dfine->add_option("--input", input, "Extended XYZ file")->required();
  dfine->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const Configuration c = read_xyz_file(input);
      emit(g, "decompose finebound", {{"input", input}, {"alpha", g.alpha}},
           dump_json(to_json(fine_bound_report(c, l.v, l.psi, g.alpha))) + "\n", l.json);
    };
  });

  // relax
  RelaxOptions ropts;
  std::string method = "fire", trajectory;
  std::vector<Real> radii{3, 4, 5, 6, 8};
  Real depth = 2.5;
  auto* re = app.add_subcommand("relax", "Relaxation and experiments")->require_subcommand(1);
  auto* rrun = re->add_subcommand("run", "Relax an XYZ configuration");
  rrun->add_option("--input", input, "Extended XYZ file")->required();
  rrun->add_option("--method", method, "fire or gradient-backtrack")->capture_default_str();
  rrun->add_option("--force-tol", ropts.force_tol)->capture_default_str();
  rrun->add_option("--max-steps", ropts.max_steps)->capture_default_str();
  rrun->add_option("--step-init", ropts.step_init)->capture_default_str();
  rrun->add_option("--trajectory", trajectory, "Multi-frame XYZ of accepted steps");
  rrun->add_option("--every", ropts.trajectory_every, "Frame interval for --trajectory")->capture_default_str();
  rrun->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      ropts.method = parse_relax_method(method);
      ropts.alpha = g.alpha;
      ropts.seed = g.seed;
      if (!trajectory.empty() && ropts.trajectory_every == 0) ropts.trajectory_every = 1;
      const RelaxResult r = relax(read_xyz_file(input), l.v, l.psi, ropts);
      if (!trajectory.empty()) {
        std::string t;
        for (const auto& f : r.frames) t += xyz_string(f);
        write_text_file(trajectory, t);
      }
      const nlohmann::json params = {{"input", input}, {"method", method}, {"force_tol", ropts.force_tol},
                                     {"max_steps", ropts.max_steps}};
      if (g.out.empty()) {
        std::cout << dump_json(to_json(r)) << "\n";
      } else {
        emit(g, "relax run", params, xyz_string(r.final, "energy=" + format_real(r.final_energy())), l.json);
        std::cout << dump_json(to_json(r)) << "\n";
      }
      if (!r.converged || !r.min_distance_ok) exit_code = kExitValidation;
    };
  });
  auto* rub = re->add_subcommand("upper-bound", "Energies of fcc balls B(0,R)");
  rub->add_option("--radii", radii)->capture_default_str();
  rub->add_flag("--json", as_json, "JSON instead of CSV");
  rub->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const auto rows = experiment_upper_bound(l.v, l.psi, radii);
      std::string text;
      if (as_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) j.push_back(to_json(r));
        text = dump_json(j) + "\n";
      } else {
        text = upper_bound_csv(rows);
      }
      emit(g, "relax upper-bound", {{"radii", radii}}, text, l.json);
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (rows[k].gap <= 0.0 || (k > 0 && rows[k].gap >= rows[k - 1].gap)) exit_code = kExitValidation;
    };
  });
  auto* rfh = re->add_subcommand("fcc-vs-hcp", "Interior energies of fcc and hcp balls");
  rfh->add_option("--radius", radius)->capture_default_str();
  rfh->add_option("--depth", depth, "Interior sites lie within radius - depth")->capture_default_str();
  rfh->callback([&] {
    action = [&] {
      const Loaded l = load_potential(g);
      const auto c = experiment_fcc_vs_hcp(l.v, l.psi, radius, depth);
      emit(g, "relax fcc-vs-hcp", {{"radius", radius}, {"depth", depth}}, dump_json(to_json(c)) + "\n", l.json);
      if (!c.fcc_lower) exit_code = kExitValidation;
    };
  });

  // verify
  std::vector<int> only;
  std::string json_out;
  auto* ve = app.add_subcommand("verify", "Acceptance suite")->require_subcommand(1);
  auto* vall = ve->add_subcommand("all", "Run every acceptance criterion");
  vall->add_option("--only", only, "Run only these criterion ids");
  vall->add_option("--json", json_out, "Write the report JSON to this file");
  vall->callback([&] {
    action = [&] {
      AcceptanceOptions o;
      o.alpha = g.alpha;
      o.only = only;
      if (g.seed != 0) o.seed = g.seed;
      const AcceptanceReport r = run_acceptance(o);
      std::cout << summary_lines(r);
      if (!json_out.empty()) {
        write_text_file(json_out, dump_json(to_json(r)) + "\n");
        write_manifest(json_out, make_manifest("verify all", {{"only", only}, {"alpha", g.alpha}}, nullptr, o.seed));
      }
      if (!r.all_passed()) exit_code = kExitValidation;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    set_thread_count(g.threads);
    if (action) action();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code;
}
