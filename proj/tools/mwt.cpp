// mwt: scene generation, triangulation, optimization and traversal benchmarks.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "mwt/anneal.hpp"
#include "mwt/cdt.hpp"
#include "mwt/experiment.hpp"
#include "mwt/generators.hpp"
#include "mwt/mesh_io.hpp"
#include "mwt/render.hpp"
#include "mwt/svg_import.hpp"

using namespace mwt;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::pair<std::string, std::string> split_kv(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw CLI::ValidationError("expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-weight constrained triangulations and ray traversal benchmarks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scene");
  std::string family = "lines", orientation = "uniform", gen_out = "-";
  int gen_n = 16, gen_segments = 3, top_lines = 1;
  double length_factor = 1.0, gap = 0.02;
  std::uint64_t gen_seed = 1;
  gen->add_option("family", family, "lines | grass | hair | curve")->check(CLI::IsMember({"lines", "grass", "hair", "curve"}));
  gen->add_option("-n,--count", gen_n, "segments (lines), leaves (grass) or strands per side (hair)");
  gen->add_option("--orientation", orientation, "vertical | uniform | diagonal")
      ->check(CLI::IsMember({"vertical", "uniform", "diagonal"}));
  gen->add_option("--length-factor", length_factor);
  gen->add_option("--segments", gen_segments, "segments per leaf or strand, or curve segments");
  gen->add_option("--top-lines", top_lines, "curve scene: 1 or 2 top lines");
  gen->add_option("--gap", gap, "curve scene: spacing of the two top lines");
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--output", gen_out, "scene file, - for stdout");

  // cdt / refine
  auto* cdt = app.add_subcommand("cdt", "Constrained Delaunay triangulation of a scene");
  auto* refine = app.add_subcommand("refine", "Optimally refined CDT (sweep over angle and area bounds)");
  std::string tri_in, tri_out = "-";
  for (auto* sc : {cdt, refine}) {
    sc->add_option("scene", tri_in)->required();
    sc->add_option("-o,--output", tri_out, "mesh file, - for stdout");
  }
  double min_angle = -1.0, max_area = -1.0;
  refine->add_option("--min-angle", min_angle, "single refinement with this bound (degrees) instead of the sweep");
  refine->add_option("--max-area", max_area, "area bound for --min-angle");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Annealing pipeline");
  std::string opt_in, opt_out = "-", config_file, mode = "full";
  std::vector<std::string> sets;
  int iterations = -1, levels = -1;
  long long steps = -1;
  std::uint64_t opt_seed = 0;
  bool verbose = false;
  opt->add_option("scene", opt_in)->required();
  opt->add_option("-o,--output", opt_out, "mesh file, - for stdout");
  opt->add_option("--mode", mode, "full | flip-polish | fixed-polish")->check(CLI::IsMember({"full", "flip-polish", "fixed-polish"}));
  opt->add_option("--config", config_file, "key = value config file");
  opt->add_option("--set", sets, "config override key=value");
  opt->add_option("--iterations", iterations);
  opt->add_option("--levels", levels);
  opt->add_option("--steps", steps, "steps per level");
  auto* seed_opt = opt->add_option("--seed", opt_seed);
  opt->add_flag("-v,--verbose", verbose, "per-level log on stderr");

  // bench
  auto* bench = app.add_subcommand("bench", "Traversal operation counts against BVH and kd-tree");
  std::string bench_scene, json_out, csv_out;
  std::vector<std::string> meshes;
  std::size_t ray_count = 100000;
  std::uint64_t ray_seed = 1;
  bool no_oracle = false;
  unsigned threads = 0;
  bench->add_option("scene", bench_scene)->required();
  bench->add_option("--mesh", meshes, "label=mesh-file, repeatable");
  bench->add_option("--rays", ray_count);
  bench->add_option("--seed", ray_seed);
  bench->add_option("--json", json_out, "JSON report path, - for stdout");
  bench->add_option("--csv", csv_out, "CSV report path, - for stdout");
  bench->add_option("--threads", threads, "0 = all cores");
  bench->add_flag("--no-oracle", no_oracle, "skip the brute-force hit check");

  // render
  auto* render = app.add_subcommand("render", "SVG of a scene with an optional structure overlay");
  std::string render_scene, render_mesh, overlay = "none", render_out = "-";
  std::size_t render_rays = 16;
  std::uint64_t render_seed = 1;
  double ct = 1.0;
  render->add_option("scene", render_scene)->required();
  render->add_option("--mesh", render_mesh, "triangulation to overlay");
  render->add_option("--overlay", overlay, "none | mesh | bvh | kdtree")->check(CLI::IsMember({"none", "mesh", "bvh", "kdtree"}));
  render->add_option("--c-t", ct, "build parameter for bvh / kdtree overlays");
  render->add_option("--rays", render_rays);
  render->add_option("--seed", render_seed);
  render->add_option("-o,--output", render_out);

  // import-svg
  auto* imp = app.add_subcommand("import-svg", "Convert an SVG drawing into a scene");
  std::string svg_in, svg_out = "-";
  SvgImportOptions svg_opt;
  imp->add_option("svg", svg_in)->required();
  imp->add_option("-o,--output", svg_out);
  imp->add_option("--flatten-tol", svg_opt.flatten_tolerance);
  imp->add_option("--merge-tol", svg_opt.merge_tolerance);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Scene sc;
      if (family == "lines") sc = gen_lines(gen_n, line_orientation_from_string(orientation), length_factor, gen_seed);
      else if (family == "grass") sc = gen_grass(gen_n, gen_segments, gen_seed);
      else if (family == "hair") sc = gen_hair(gen_n, gen_segments, gen_seed);
      else sc = gen_curve_lines(top_lines, gen->count("--segments") ? gen_segments : 64, gap);
      std::ostringstream os;
      write_scene(os, sc);
      write_text(gen_out, os.str());
    } else if (*cdt || *refine) {
      const Scene sc = load_scene(tri_in);
      Triangulation t;
      if (*cdt) {
        t = build_cdt(sc);
      } else if (min_angle >= 0.0) {
        const auto r = refine_cdt(build_cdt(sc), min_angle,
                                  max_area > 0.0 ? max_area : std::numeric_limits<double>::infinity());
        if (r.partial) std::cerr << "warning: refinement stopped at the vertex guard\n";
        t = r.tri;
      } else {
        const auto r = optimal_refined_cdt(sc);
        std::cerr << "min_angle " << r.min_angle << " max_area " << r.max_area << " length " << r.length << '\n';
        t = r.tri;
      }
      std::ostringstream os;
      write_mesh(os, t);
      write_text(tri_out, os.str());
    } else if (*opt) {
      const Scene sc = load_scene(opt_in);
      PipelineConfig cfg = config_file.empty() ? PipelineConfig{} : load_config(config_file);
      for (const auto& s : sets) {
        const auto [k, v] = split_kv(s);
        apply_config_line(cfg, k, v);
      }
      if (iterations > 0) cfg.iterations = iterations;
      if (levels > 0) cfg.anneal.schedule.levels = levels;
      if (steps > 0) cfg.anneal.schedule.steps_per_level = steps;
      if (seed_opt->count()) cfg.anneal.seed = opt_seed;
      cfg.mode = mode == "full" ? PipelineMode::Full : mode == "flip-polish" ? PipelineMode::FlipPolish : PipelineMode::FixedPolish;
      if (verbose) cfg.anneal.log = &std::cerr;
      const auto r = full_pipeline(sc, cfg);
      std::cerr << "cdt " << r.cdt_length << " refined " << r.refined_length << " optimized " << r.length << '\n';
      std::ostringstream os;
      write_mesh(os, r.tri);
      write_text(opt_out, os.str());
    } else if (*bench) {
      const Scene sc = load_scene(bench_scene);
      std::vector<NamedTriangulation> tris;
      for (const auto& m : meshes) {
        const auto [label, path] = m.find('=') == std::string::npos ? std::pair{m, m} : split_kv(m);
        tris.push_back({label, load_mesh(path)});
      }
      const auto rays = sample_rays(sc, ray_count, ray_seed);
      ExperimentOptions eo;
      eo.check_oracle = !no_oracle;
      eo.threads = threads;
      const auto rep = run_experiment(sc, tris, rays, ray_seed, eo);
      const std::vector<std::pair<std::string, std::string>> echo{
          {"scene", bench_scene}, {"rays", std::to_string(ray_count)}, {"seed", std::to_string(ray_seed)},
          {"oracle", no_oracle ? "off" : "on"}};
      if (!json_out.empty()) {
        std::ostringstream os;
        write_json(os, {rep}, echo);
        write_text(json_out, os.str());
      }
      if (!csv_out.empty()) {
        std::ostringstream os;
        write_csv(os, {rep});
        write_text(csv_out, os.str());
      }
      if (json_out.empty() && csv_out.empty()) {
        for (const auto& m : rep.methods) std::cout << m.label << ' ' << m.mean_ops << '\n';
      }
    } else if (*render) {
      const Scene sc = load_scene(render_scene);
      const auto rays = render_rays ? sample_rays(sc, render_rays, render_seed) : std::vector<Ray>{};
      std::string svg;
      if (overlay == "mesh" || (overlay == "none" && !render_mesh.empty())) {
        if (render_mesh.empty()) throw CLI::ValidationError("--overlay mesh needs --mesh");
        svg = render_svg(sc, load_mesh(render_mesh), rays);
      } else if (overlay == "bvh") {
        svg = render_svg(sc, Bvh::build(sc, ct), rays);
      } else if (overlay == "kdtree") {
        svg = render_svg(sc, RopedKdTree::build(sc, ct), rays);
      } else {
        svg = render_svg(sc, rays);
      }
      write_text(render_out, svg);
    } else if (*imp) {
      std::vector<std::string> warnings;
      const Scene sc = import_svg(svg_in, svg_opt, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      std::ostringstream os;
      write_scene(os, sc);
      write_text(svg_out, os.str());
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
