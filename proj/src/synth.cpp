#include "umsa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "umsa/errors.hpp"
#include "umsa/rng.hpp"
#include "umsa/sequence_file.hpp"

namespace umsa {

namespace {

int grid_side(int dim_tool) {
  const int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim_tool))));
  if (g * g != dim_tool)
    throw ConfigError("dim_tool must be a perfect square of spatial grid cells");
  return g;
}

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

// Uniform vector normalized onto the simplex. Always consumes `n` draws.
void simplex_noise(Rng &rng, int n, std::vector<double> &out) {
  out.resize(static_cast<size_t>(n));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = rng.uniform() + 1e-12;
    sum += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= sum;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_trials < 0) throw ConfigError("n_trials must be non-negative");
  if (length_min < 2 || length_max < length_min)
    throw ConfigError("length range must satisfy 2 <= min <= max");
  if (dim_visual < 1 || dim_tool < 1 || event_classes < 2)
    throw ConfigError("feature dims must be positive (and at least 2 event classes)");
  if (dim_proxy != 1) throw ConfigError("the proxy path carries a single channel");
  grid_side(dim_tool);
  if (n_users < 1 || n_tasks < 1) throw ConfigError("need at least one user and task");
  for (double nz : {noise_event, noise_tool, noise_proxy, noise_visual, grs_noise})
    if (nz < 0.0 || nz > 1.0) throw ConfigError("noise levels must lie in [0, 1]");
  if (!(grs_min < grs_max)) throw ConfigError("grs range: min must be below max");
  if (backward_jump < 0.0 || backward_jump > 1.0)
    throw ConfigError("backward_jump must lie in [0, 1]");
  if (advance_prob <= 0.0 || advance_prob > 1.0)
    throw ConfigError("advance_prob must lie in (0, 1]");
}

std::vector<SynthTrial> synth_generate(const SynthConfig &cfg) {
  cfg.validate();
  const int g = grid_side(cfg.dim_tool);
  const int c = cfg.event_classes;
  const int zdim = c + cfg.dim_tool + 1;

  // Dataset-level projection shared by every trial.
  Rng proj_rng = Rng::derive(cfg.seed, "synth.visual_projection");
  Tensor2D proj(cfg.dim_visual, zdim);
  {
    const double s = std::sqrt(3.0 / static_cast<double>(zdim));
    for (double &e : proj.v) e = proj_rng.uniform(-s, s);
  }

  std::vector<SynthTrial> out;
  out.reserve(static_cast<size_t>(cfg.n_trials));
  std::vector<double> noise;

  for (int idx = 0; idx < cfg.n_trials; ++idx) {
    Rng rng(cfg.seed ^ static_cast<uint64_t>(idx));
    SynthTrial st;
    Trial &t = st.trial;

    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "trial_%03d", idx);
    t.trial_id = idbuf;
    t.task_id = "task_" + std::to_string(idx % cfg.n_tasks);
    t.user_id = "user_" + std::to_string(idx % cfg.n_users);

    const double u = rng.uniform();
    st.latent = u;
    const int len = static_cast<int>(rng.uniform_int(cfg.length_min, cfg.length_max));
    const double range = cfg.grs_max - cfg.grs_min;
    const double grs_jitter = (2.0 * rng.uniform() - 1.0) * cfg.grs_noise * range;
    t.grs = std::clamp(denormalize_grs(u, cfg.grs_min, cfg.grs_max) + grs_jitter,
                       cfg.grs_min, cfg.grs_max);
    t.grs_min = cfg.grs_min;
    t.grs_max = cfg.grs_max;

    // Event path: cyclic left-to-right workflow. Moves happen at rate
    // advance_prob; a move goes backward with probability
    // backward_jump * (1 - u). Draw counts per step are fixed so the
    // move pattern is comparable across u at the same seed.
    Tensor2D ev(len, c);
    int state = 0;
    for (int i = 0; i < len; ++i) {
      const double r_move = rng.uniform();
      const double r_dir = rng.uniform();
      if (r_move < cfg.advance_prob) {
        if (r_dir < cfg.backward_jump * (1.0 - u)) {
          state = (state + c - 1) % c;
          ++st.backward_jumps;
        } else {
          state = (state + 1) % c;
        }
      }
      simplex_noise(rng, c, noise);
      double *row = ev.row(i);
      for (int j = 0; j < c; ++j)
        row[j] = (1.0 - cfg.noise_event) * (j == state ? 1.0 : 0.0) +
                 cfg.noise_event * noise[j];
    }
    t.features.emplace(PathId::E, std::move(ev));

    // Tool path: random-walk trajectory, jerkier and faster when
    // unskilled; features are a soft spatial histogram on a g x g grid.
    Tensor2D tool(len, cfg.dim_tool);
    double px = 0.5, py = 0.5;
    double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double sigma = 0.2;
    for (int i = 0; i < len; ++i) {
      const double r_jit = rng.uniform();
      const double r_len = rng.uniform();
      heading += (0.15 + 1.85 * (1.0 - u)) * 0.9 * (2.0 * r_jit - 1.0);
      const double step = 0.012 + 0.06 * (1.0 - u) * r_len;
      px += step * std::cos(heading);
      py += step * std::sin(heading);
      if (px < 0.0) px = -px;
      if (px > 1.0) px = 2.0 - px;
      if (py < 0.0) py = -py;
      if (py > 1.0) py = 2.0 - py;
      double *row = tool.row(i);
      double hsum = 0.0;
      for (int cy = 0; cy < g; ++cy) {
        for (int cx = 0; cx < g; ++cx) {
          const double dx = px - (cx + 0.5) / g;
          const double dy = py - (cy + 0.5) / g;
          const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
          row[cy * g + cx] = w;
          hsum += w;
        }
      }
      simplex_noise(rng, cfg.dim_tool, noise);
      for (int j = 0; j < cfg.dim_tool; ++j)
        row[j] = (1.0 - cfg.noise_tool) * row[j] / hsum + cfg.noise_tool * noise[j];
    }
    t.features.emplace(PathId::T, std::move(tool));

    // Proxy path: the latent itself plus observation noise.
    Tensor2D proxy(len, 1);
    for (int i = 0; i < len; ++i) proxy.v[i] = clip01(u + cfg.noise_proxy * rng.normal());
    t.features.emplace(PathId::P, std::move(proxy));

    // Visual path: fixed random projection of the other paths plus noise.
    Tensor2D vis(len, cfg.dim_visual);
    std::vector<double> z(static_cast<size_t>(zdim));
    for (int i = 0; i < len; ++i) {
      const double *erow = t.features.at(PathId::E).row(i);
      const double *trow = t.features.at(PathId::T).row(i);
      std::copy(erow, erow + c, z.begin());
      std::copy(trow, trow + cfg.dim_tool, z.begin() + c);
      z[static_cast<size_t>(zdim) - 1] = t.features.at(PathId::P).v[i];
      double *row = vis.row(i);
      for (int d = 0; d < cfg.dim_visual; ++d) {
        double acc = 0.0;
        const double *prow = proj.row(d);
        for (int j = 0; j < zdim; ++j) acc += prow[j] * z[j];
        row[d] = acc + cfg.noise_visual * rng.normal();
      }
    }
    t.features.emplace(PathId::V, std::move(vis));

    out.push_back(std::move(st));
  }
  return out;
}

Manifest write_synth_trials(std::span<const SynthTrial> trials,
                            const std::filesystem::path &out_dir) {
  std::filesystem::create_directories(out_dir);
  Manifest m;
  m.dir = out_dir;
  for (const auto &st : trials) {
    ManifestEntry e;
    e.trial_id = st.trial.trial_id;
    e.task_id = st.trial.task_id;
    e.user_id = st.trial.user_id;
    e.grs = st.trial.grs;
    e.grs_min = st.trial.grs_min;
    e.grs_max = st.trial.grs_max;
    for (const auto &[id, seq] : st.trial.features) {
      const std::string file = st.trial.trial_id + "_" + path_letter(id) + std::string(".seq");
      write_sequence(seq, out_dir / file);
      e.sequence_files[id] = file;
    }
    m.trials.push_back(std::move(e));
  }
  write_manifest(m, out_dir / "manifest.json");
  return m;
}

Manifest synth_write(const SynthConfig &cfg, const std::filesystem::path &out_dir) {
  const auto trials = synth_generate(cfg);
  return write_synth_trials(trials, out_dir);
}

}  // namespace umsa
