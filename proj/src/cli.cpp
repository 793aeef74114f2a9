// Copyright 2026 The rairs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rairs/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "rairs/air_verify.hpp"
#include "rairs/bench.hpp"
#include "rairs/index.hpp"

namespace rairs::cli {

namespace {

// Every value any subcommand can take. Each subcommand binds a subset.
struct Settings {
  std::string config;

  std::string base, queries, train, gt, index, out, csv, cdf, ids_file;
  std::string write_base, write_queries;
  std::size_t synth_n = 0, synth_nq = 0, synth_dim = 32, synth_clusters = 100;
  float synth_spread = 0.05f;
  std::string metric = "l2";

  std::vector<std::string> strategies{"air"};
  float lambda = 0.5f;
  std::size_t n_cands = 10;
  std::size_t m = 0;  // 0: strategy default
  std::string aggr = "max";

  std::size_t nlist = 0, pq_groups = 0, nbits = 4, block_size = 32;
  std::size_t kmeans_iters = 25, max_train = 0;
  std::string layout = "seil";

  std::size_t k = 10, k_factor = 0, nprobe = 1;
  std::vector<std::size_t> nprobes{1, 2, 4, 8, 16, 32};
  int threads = std::max(1u, std::thread::hardware_concurrency());
  bool one_at_a_time = false, grouped = false;
  double target = 0.9;
  std::uint64_t seed = 1;

  int air_dim = 8;
  double l_m = 0.5;
  std::size_t air_cands = 50, samples = 100000;
  double r_min = 0.1, r_max = 1.0, rp_min = 1.0, rp_max = 2.0;

  std::vector<VecId> ids;
  long long first_id = -1;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// --- option groups --------------------------------------------------------

void add_config(CLI::App* c, Settings& s) {
  c->add_option("--config", s.config,
                "key=value file; command-line flags take precedence")
      ->check(CLI::ExistingFile);
}

void add_data(CLI::App* c, Settings& s, bool with_queries) {
  c->add_option("--base", s.base, "base vectors (.fvecs/.bvecs)");
  if (with_queries) c->add_option("--queries", s.queries, "query vectors");
  c->add_option("--synth-n", s.synth_n,
                "generate this many synthetic base vectors instead of --base");
  if (with_queries) {
    c->add_option("--synth-nq", s.synth_nq, "synthetic query count");
  }
  c->add_option("--synth-dim", s.synth_dim, "synthetic dimension")
      ->capture_default_str();
  c->add_option("--synth-clusters", s.synth_clusters, "synthetic blob count")
      ->capture_default_str();
  c->add_option("--synth-spread", s.synth_spread, "synthetic blob stddev")
      ->capture_default_str();
  c->add_option("--seed", s.seed, "random seed")->capture_default_str();
}

void add_metric(CLI::App* c, Settings& s) {
  c->add_option("--metric", s.metric, "l2 or ip")
      ->check(CLI::IsMember({"l2", "ip"}))
      ->capture_default_str();
}

void add_strategy(CLI::App* c, Settings& s, bool many) {
  auto* o = c->add_option("--strategy", s.strategies,
                          "single|naive|soarl2|soar-ip|air|air-strict|air-m");
  if (many) {
    o->delimiter(',');
  } else {
    o->expected(1);
  }
  o->capture_default_str();
  c->add_option("--lambda", s.lambda, "loss weight")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c->add_option("--n-cands", s.n_cands, "candidate lists for the second choice")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--m", s.m, "lists per vector for air-m (default 3)");
  c->add_option("--aggr", s.aggr, "air-m loss aggregation")
      ->check(CLI::IsMember({"max", "min", "avg"}))
      ->capture_default_str();
}

void add_index_params(CLI::App* c, Settings& s) {
  c->add_option("--nlist", s.nlist, "lists (0: ~sqrt(n), power of two)")
      ->capture_default_str();
  c->add_option("--pq-m", s.pq_groups, "PQ sub-groups (0: dim/2)")
      ->capture_default_str();
  c->add_option("--nbits", s.nbits, "bits per PQ code")
      ->check(CLI::Range(1, 8))
      ->capture_default_str();
  c->add_option("--blk-sz", s.block_size, "fast-scan block size")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  c->add_option("--layout", s.layout, "seil or plain")
      ->check(CLI::IsMember({"seil", "plain"}))
      ->capture_default_str();
  c->add_option("--kmeans-iters", s.kmeans_iters)->capture_default_str();
  c->add_option("--max-train", s.max_train, "training subsample (0: all)")
      ->capture_default_str();
  add_metric(c, s);
}

void add_search_params(CLI::App* c, Settings& s, bool sweep) {
  c->add_option("--k,-k", s.k, "neighbors per query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--k-factor", s.k_factor, "candidates kept = K * factor (0: auto)")
      ->capture_default_str();
  if (sweep) {
    c->add_option("--nprobe", s.nprobes, "comma-separated nprobe values")
        ->delimiter(',')
        ->capture_default_str();
    c->add_option("--target", s.target, "recall for the summary line")
        ->capture_default_str();
  } else {
    c->add_option("--nprobe", s.nprobe, "lists probed per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  c->add_option("--threads", s.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

// Applies config-file keys that were not given on the command line.
void merge_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto trim = [](std::string x) {
      const auto b = x.find_first_not_of(" \t\r");
      const auto e = x.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) +
                       ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = key == "config" ? nullptr
                                       : sub->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" +
                       key + "' for " + sub->get_name());
    }
    if (opt->count() != 0) continue;  // flag wins
    opt->add_result(value);
    opt->run_callback();
  }
}

// --- data helpers ---------------------------------------------------------

Metric metric_of(const Settings& s) { return parse_metric(s.metric); }

/// Base and (optionally) queries from files, or one synthetic draw split
/// into base rows [0, n) and query rows [n, n + nq).
std::pair<VectorSet, VectorSet> load_data(const Settings& s, bool need_queries) {
  VectorSet base, queries;
  if (!s.base.empty()) {
    base = load_vectors(s.base);
  } else if (s.synth_n > 0) {
    const std::size_t nq = need_queries ? s.synth_nq : 0;
    const VectorSet all = generate_synthetic(s.synth_n + nq, s.synth_dim,
                                             s.synth_clusters, s.seed,
                                             s.synth_spread);
    base = all.slice(0, s.synth_n);
    if (nq > 0) queries = all.slice(s.synth_n, s.synth_n + nq).renumbered(0);
  } else {
    throw UsageError("need --base or --synth-n");
  }
  if (need_queries) {
    if (!s.queries.empty()) {
      queries = load_vectors(s.queries);
    } else if (queries.empty()) {
      throw UsageError("need --queries (or --synth-nq with --synth-n)");
    }
    if (queries.dim() != base.dim()) {
      throw DimensionMismatch("queries have dim " + std::to_string(queries.dim()) +
                              ", base has " + std::to_string(base.dim()));
    }
  }
  return {std::move(base), std::move(queries)};
}

StrategyConfig strategy_of(const Settings& s, const std::string& name) {
  StrategyConfig cfg = parse_strategy(name);
  cfg.lambda = s.lambda;
  cfg.n_cands = s.n_cands;
  cfg.aggr = parse_aggregation(s.aggr);
  if (s.m != 0) {
    if (cfg.kind != StrategyKind::kAir || cfg.m < 3) {
      throw UsageError("--m applies to air-m only");
    }
    cfg.m = s.m;
  }
  return cfg;
}

IndexParams index_params_of(const Settings& s) {
  IndexParams p;
  p.nlist = s.nlist;
  p.pq_groups = s.pq_groups;
  p.nbits = s.nbits;
  p.block_size = s.block_size;
  p.metric = metric_of(s);
  p.strategy = strategy_of(s, s.strategies.at(0));
  p.layout = parse_layout(s.layout);
  p.kmeans_iters = s.kmeans_iters;
  p.max_train_points = s.max_train;
  p.seed = s.seed;
  return p;
}

SearchParams search_params_of(const Settings& s) {
  SearchParams sp;
  sp.k = s.k;
  sp.k_factor = s.k_factor;
  sp.nprobe = s.nprobe;
  sp.num_threads = s.threads;
  return sp;
}

void print_info(const RairsIndex& idx, std::ostream& out) {
  const IndexParams& p = idx.params();
  const StrategyConfig& st = p.strategy;
  out << "dim=" << idx.dim() << '\n'
      << "ntotal=" << idx.ntotal() << '\n'
      << "stored_items=" << idx.lists().num_stored_items() << '\n'
      << "metric=" << metric_name(p.metric) << '\n'
      << "nlist=" << p.nlist << '\n'
      << "pq_m=" << p.pq_groups << '\n'
      << "nbits=" << p.nbits << '\n'
      << "blk_sz=" << p.block_size << '\n'
      << "layout=" << layout_name(p.layout) << '\n'
      << "strategy=" << strategy_name(st) << '\n'
      << "lambda=" << st.lambda << '\n'
      << "n_cands=" << st.n_cands << '\n'
      << "is_strict=" << (st.is_strict ? "true" : "false") << '\n'
      << "m=" << st.multiplicity() << '\n'
      << "aggr=" << aggregation_name(st.aggr) << '\n'
      << "kmeans_iters=" << p.kmeans_iters << '\n'
      << "seed=" << p.seed << '\n';
}

// --- subcommands ----------------------------------------------------------

int cmd_gt(const Settings& s, std::ostream& out) {
  auto [base, queries] = load_data(s, true);
  if (!s.write_base.empty()) write_fvecs(s.write_base, base);
  if (!s.write_queries.empty()) write_fvecs(s.write_queries, queries);
  if (s.out.empty()) {
    if (s.write_base.empty() && s.write_queries.empty()) {
      throw UsageError("gt: need --out");
    }
    return kOk;
  }
  const GroundTruth gt = exact_knn(base, queries, s.k, metric_of(s), s.threads);
  write_ivecs(s.out, gt.to_ivecs());
  out << "wrote " << gt.num_queries() << " x " << gt.k << " ground truth to "
      << s.out << '\n';
  return kOk;
}

int cmd_build(const Settings& s, std::ostream& out) {
  if (s.out.empty()) throw UsageError("build: need --out");
  auto [base, unused] = load_data(s, false);
  const VectorSet train = s.train.empty() ? base : load_vectors(s.train);
  RairsIndex idx = RairsIndex::train(train, index_params_of(s));
  idx.add(base, s.threads);
  idx.save(s.out);
  out << "built " << idx.ntotal() << " vectors into " << idx.params().nlist
      << " lists (" << idx.lists().num_stored_items() << " stored codes), wrote "
      << s.out << '\n';
  return kOk;
}

int cmd_search(const Settings& s, std::ostream& out) {
  if (s.index.empty()) throw UsageError("search: need --index");
  if (s.queries.empty()) throw UsageError("search: need --queries");
  const RairsIndex idx = RairsIndex::load(s.index);
  const VectorSet queries = load_vectors(s.queries);
  const SearchParams sp = search_params_of(s);
  const SearchResults res =
      s.grouped ? idx.search_grouped(queries, sp) : idx.search(queries, sp);
  if (!s.out.empty()) {
    IntRecords r;
    r.dim = sp.k;
    for (const auto& row : res.neighbors) {
      for (std::size_t i = 0; i < sp.k; ++i) {
        r.data.push_back(i < row.size() ? static_cast<std::int32_t>(row[i].id) : -1);
      }
    }
    write_ivecs(s.out, r);
  } else {
    out << "query,rank,id,distance\n";
    for (std::size_t q = 0; q < res.num_queries(); ++q) {
      for (std::size_t i = 0; i < res.neighbors[q].size(); ++i) {
        out << q << ',' << i << ',' << res.neighbors[q][i].id << ','
            << res.neighbors[q][i].distance << '\n';
      }
    }
  }
  double dco = 0;
  for (const auto& st : res.stats) dco += double(st.counters.scan_dco);
  std::cerr << "mean scan_dco " << dco / double(std::max<std::size_t>(1, res.num_queries()))
            << '\n';
  return kOk;
}

int cmd_bench(const Settings& s, std::ostream& out) {
  std::vector<std::pair<std::string, RairsIndex>> indexes;
  VectorSet queries;
  GroundTruth gt;
  if (!s.index.empty()) {
    indexes.emplace_back("", RairsIndex::load(s.index));
    if (s.queries.empty()) throw UsageError("bench: need --queries with --index");
    queries = load_vectors(s.queries);
    indexes[0].first = strategy_name(indexes[0].second.params().strategy);
  } else {
    auto [base, q] = load_data(s, true);
    queries = std::move(q);
    // Quantizers are trained once and shared so strategies differ only in
    // assignment.
    IndexParams p = index_params_of(s);
    const RairsIndex proto = RairsIndex::train(base, p);
    for (const auto& name : s.strategies) {
      IndexParams pi = proto.params();
      pi.strategy = strategy_of(s, name);
      pi.layout = parse_layout(s.layout);
      RairsIndex idx(proto.quantizer(), proto.codebook(), pi);
      idx.add(base, s.threads);
      indexes.emplace_back(name, std::move(idx));
    }
    if (s.gt.empty()) gt = exact_knn(base, queries, s.k, metric_of(s), s.threads);
  }
  if (!s.gt.empty()) {
    gt = GroundTruth::from_ivecs(load_ivecs(s.gt), indexes[0].second.params().metric);
  } else if (gt.k == 0) {
    gt = exact_knn(indexes[0].second.refine_store().live(), queries, s.k,
                   indexes[0].second.params().metric, s.threads);
  }
  if (gt.num_queries() != queries.count()) {
    throw UsageError("ground truth has " + std::to_string(gt.num_queries()) +
                     " rows for " + std::to_string(queries.count()) + " queries");
  }

  std::ofstream csv_file;
  if (!s.csv.empty()) {
    csv_file.open(s.csv);
    if (!csv_file) throw std::runtime_error("cannot write " + s.csv);
  }
  std::ostream& csv = s.csv.empty() ? out : csv_file;
  bool header = true;
  for (auto& [label, idx] : indexes) {
    SweepOptions opt;
    opt.label = label;
    opt.k = s.k;
    opt.k_factor = s.k_factor;
    opt.num_threads = s.threads;
    opt.one_at_a_time = s.one_at_a_time;
    opt.nprobes.clear();
    for (auto np : s.nprobes) {
      if (np >= 1 && np <= idx.params().nlist) opt.nprobes.push_back(np);
    }
    const BenchReport rep = sweep(idx, queries, gt, opt);
    rep.write_csv(csv, header);
    header = false;
    const SweepPoint* hit = rep.first_reaching(s.target);
    std::ostream& note = s.csv.empty() ? std::cerr : out;
    if (hit == nullptr) {
      note << label << ": recall " << s.target << " not reached\n";
    } else {
      note << label << ": recall " << s.target << " at nprobe=" << hit->nprobe
           << " scan_dco=" << hit->scan_dco << '\n';
      if (!s.cdf.empty()) {
        const std::string path = indexes.size() == 1 ? s.cdf : s.cdf + "." + label;
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        rep.write_cdf(f, static_cast<std::size_t>(hit - rep.points.data()));
      }
    }
  }
  return kOk;
}

int cmd_stats(const Settings& s, std::ostream& out) {
  if (s.index.empty()) throw UsageError("stats: need --index");
  const RairsIndex idx = RairsIndex::load(s.index);
  const auto assigns = idx.pair_assignments();
  const CellStats cs = cell_stats(assigns, idx.params().block_size);
  out << "vectors=" << cs.num_vectors << '\n'
      << "cells=" << cs.num_cells << '\n'
      << "stored_items=" << idx.lists().num_stored_items() << '\n'
      << "layout_copies=" << cs.stored_copies() << '\n'
      << "shared_block_items=" << cs.shared_block_items << '\n'
      << "misc_item_copies=" << cs.misc_item_copies << '\n'
      << "two_list_fraction=" << cs.two_list_fraction << '\n'
      << "large_cell_fraction=" << cs.large_cell_fraction << '\n';
  if (!s.csv.empty()) {
    std::ofstream f(s.csv);
    if (!f) throw std::runtime_error("cannot write " + s.csv);
    f << "cell_size,cumulative_fraction\n";
    for (const auto& [size, frac] : cs.cdf()) f << size << ',' << frac << '\n';
  }
  return kOk;
}

std::vector<float> random_direction(std::mt19937_64& rng, int d, double norm) {
  std::normal_distribution<double> g(0, 1);
  std::vector<double> v(d);
  double n2 = 0;
  for (auto& x : v) {
    x = g(rng);
    n2 += x * x;
  }
  const double scale = norm / std::sqrt(n2);
  std::vector<float> out(d);
  for (int i = 0; i < d; ++i) out[i] = static_cast<float>(v[i] * scale);
  return out;
}

int cmd_verify_air(const Settings& s, std::ostream& out) {
  if (s.air_dim < 2) throw UsageError("verify-air: --dim must be >= 2");
  if (!(s.r_min > 0 && s.r_min <= s.r_max && s.rp_min > 0 && s.rp_min <= s.rp_max)) {
    throw UsageError("verify-air: bad residual norm ranges");
  }
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<float> g(0.f, 1.f);
  std::vector<float> x(s.air_dim);
  for (auto& v : x) v = g(rng);
  std::uniform_real_distribution<double> rn(s.r_min, s.r_max);
  std::vector<float> c = random_direction(rng, s.air_dim, rn(rng));
  for (int i = 0; i < s.air_dim; ++i) c[i] += x[i];
  std::uniform_real_distribution<double> rpn(s.rp_min, s.rp_max);
  std::vector<std::vector<float>> cands;
  for (std::size_t j = 0; j < s.air_cands; ++j) {
    auto cp = random_direction(rng, s.air_dim, rpn(rng));
    for (int i = 0; i < s.air_dim; ++i) cp[i] += x[i];
    cands.push_back(std::move(cp));
  }
  const AirVerifyResult r = verify_air(x, c, cands, s.l_m, s.samples, s.seed + 1);
  out << std::setprecision(6) << "dim=" << r.dim << " l_m=" << r.l_m
      << " |r|=" << r.r_norm << " lambda_theory=" << r.lambda_theory
      << " samples=" << r.samples << '\n'
      << "correlation=" << r.correlation << '\n'
      << "ratio_spread=" << r.ratio_spread << '\n'
      << "fitted_ratio=" << r.fitted_ratio << " expected_ratio=" << r.expected_ratio
      << '\n';
  if (!s.csv.empty()) {
    std::ofstream f(s.csv);
    if (!f) throw std::runtime_error("cannot write " + s.csv);
    f << "candidate,monte_carlo,closed_form,ratio\n" << std::setprecision(9);
    for (std::size_t j = 0; j < r.candidates.size(); ++j) {
      const auto& cc = r.candidates[j];
      f << j << ',' << cc.monte_carlo << ',' << cc.closed_form << ',' << cc.ratio << '\n';
    }
  }
  return kOk;
}

int cmd_insert(const Settings& s, std::ostream& out) {
  if (s.index.empty()) throw UsageError("insert: need --index");
  RairsIndex idx = RairsIndex::load(s.index);
  auto [vecs, unused] = load_data(s, false);
  if (s.first_id >= 0) vecs = vecs.renumbered(static_cast<VecId>(s.first_id));
  idx.add(vecs, s.threads);
  const std::string dst = s.out.empty() ? s.index : s.out;
  idx.save(dst);
  out << "inserted " << vecs.count() << ", ntotal=" << idx.ntotal() << ", wrote "
      << dst << '\n';
  return kOk;
}

int cmd_delete(const Settings& s, std::ostream& out) {
  if (s.index.empty()) throw UsageError("delete: need --index");
  std::vector<VecId> ids = s.ids;
  if (!s.ids_file.empty()) {
    const IntRecords r = load_ivecs(s.ids_file);
    for (auto v : r.data) {
      if (v < 0) throw FormatError("negative id in " + s.ids_file);
      ids.push_back(static_cast<VecId>(v));
    }
  }
  if (ids.empty()) throw UsageError("delete: need --ids or --ids-file");
  RairsIndex idx = RairsIndex::load(s.index);
  const DeleteReport rep = idx.remove(ids);
  const std::string dst = s.out.empty() ? s.index : s.out;
  idx.save(dst);
  out << "deleted " << rep.deleted.size() << ", missing " << rep.missing.size()
      << ", ntotal=" << idx.ntotal() << ", wrote " << dst << '\n';
  return kOk;
}

int cmd_info(const Settings& s, std::ostream& out) {
  if (s.index.empty()) throw UsageError("info: need --index");
  print_info(RairsIndex::load(s.index), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Settings s;
  CLI::App app{"IVF-PQ index with redundant assignment and shared-cell lists",
               "rairs_cli"};
  app.require_subcommand(1);

  auto* gt = app.add_subcommand("gt", "exact ground truth (.ivecs)");
  add_config(gt, s);
  add_data(gt, s, true);
  add_metric(gt, s);
  gt->add_option("--k,-k", s.k, "neighbors per query")->capture_default_str();
  gt->add_option("--out", s.out, "output .ivecs");
  gt->add_option("--write-base", s.write_base, "also save the base set (.fvecs)");
  gt->add_option("--write-queries", s.write_queries, "also save the queries (.fvecs)");
  gt->add_option("--threads", s.threads)->capture_default_str();

  auto* build = app.add_subcommand("build", "train and fill an index");
  add_config(build, s);
  add_data(build, s, false);
  build->add_option("--train", s.train, "training vectors (default: base)");
  add_strategy(build, s, false);
  add_index_params(build, s);
  build->add_option("--out", s.out, "index file to write");
  build->add_option("--threads", s.threads)->capture_default_str();

  auto* search = app.add_subcommand("search", "query an index");
  add_config(search, s);
  search->add_option("--index", s.index, "index file");
  search->add_option("--queries", s.queries, "query vectors");
  add_search_params(search, s, false);
  search->add_flag("--grouped", s.grouped, "group list traversal across queries");
  search->add_option("--out", s.out, "result IDs (.ivecs); default prints CSV");

  auto* bench = app.add_subcommand("bench", "recall / DCO / QPS sweep over nprobe");
  add_config(bench, s);
  add_data(bench, s, true);
  bench->add_option("--index", s.index, "benchmark a saved index instead of building");
  bench->add_option("--gt", s.gt, "ground truth (.ivecs); default: computed");
  add_strategy(bench, s, true);
  add_index_params(bench, s);
  add_search_params(bench, s, true);
  bench->add_flag("--one-at-a-time", s.one_at_a_time,
                  "also time single-query search for latency percentiles");
  bench->add_option("--csv", s.csv, "sweep CSV (default stdout)");
  bench->add_option("--cdf", s.cdf, "per-query CDF at the target recall");

  auto* stats = app.add_subcommand("stats", "cell size and sharing statistics");
  add_config(stats, s);
  stats->add_option("--index", s.index, "index file");
  stats->add_option("--csv", s.csv, "cell-size CDF output");

  auto* verify = app.add_subcommand("verify-air", "Monte Carlo check of the AIR loss");
  add_config(verify, s);
  verify->add_option("--dim", s.air_dim)->capture_default_str();
  verify->add_option("--lm", s.l_m, "query ball radius")->capture_default_str();
  verify->add_option("--cands", s.air_cands)->capture_default_str();
  verify->add_option("--samples", s.samples)->capture_default_str();
  verify->add_option("--r-min", s.r_min)->capture_default_str();
  verify->add_option("--r-max", s.r_max)->capture_default_str();
  verify->add_option("--rp-min", s.rp_min)->capture_default_str();
  verify->add_option("--rp-max", s.rp_max)->capture_default_str();
  verify->add_option("--seed", s.seed)->capture_default_str();
  verify->add_option("--csv", s.csv, "per-candidate output");

  auto* insert = app.add_subcommand("insert", "add vectors to an index");
  add_config(insert, s);
  insert->add_option("--index", s.index, "index file");
  add_data(insert, s, false);
  insert->add_option("--first-id", s.first_id, "renumber the batch from this ID");
  insert->add_option("--out", s.out, "output index (default: overwrite)");
  insert->add_option("--threads", s.threads)->capture_default_str();

  auto* del = app.add_subcommand("delete", "remove vectors by ID");
  add_config(del, s);
  del->add_option("--index", s.index, "index file");
  del->add_option("--ids", s.ids, "comma-separated IDs")->delimiter(',');
  del->add_option("--ids-file", s.ids_file, "IDs as .ivecs");
  del->add_option("--out", s.out, "output index (default: overwrite)");

  auto* info = app.add_subcommand("info", "print the index configuration");
  add_config(info, s);
  info->add_option("--index", s.index, "index file");

  CLI::App* sub = nullptr;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    sub = app.get_subcommands().at(0);
    if (!s.config.empty()) merge_config(sub, s.config);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }

  try {
    const std::string name = sub->get_name();
    if (name == "gt") return cmd_gt(s, out);
    if (name == "build") return cmd_build(s, out);
    if (name == "search") return cmd_search(s, out);
    if (name == "bench") return cmd_bench(s, out);
    if (name == "stats") return cmd_stats(s, out);
    if (name == "verify-air") return cmd_verify_air(s, out);
    if (name == "insert") return cmd_insert(s, out);
    if (name == "delete") return cmd_delete(s, out);
    return cmd_info(s, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << sub->help();
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    // Parameter combinations rejected by the library (e.g. n_cands > nlist).
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rairs::cli
