#include "s1d/sweep.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

namespace s1d {

namespace {

using Key = std::tuple<int, double, Boundary>;

// Full spectra shared by all temperatures of one (L, U). Entries are dropped
// once every item that needs them has run.
class SpectrumCache {
 public:
  void expect(const Key& k) { ++entries_[k].remaining; }

  std::shared_ptr<const FullSpectrum> get(const Key& k) {
    std::shared_future<std::shared_ptr<const FullSpectrum>> fut;
    std::promise<std::shared_ptr<const FullSpectrum>> promise;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto& e = entries_[k];
      if (!e.future.valid()) {
        e.future = promise.get_future().share();
        owner = true;
      }
      fut = e.future;
    }
    if (owner) {
      try {
        const auto& [L, U, b] = k;
        promise.set_value(std::make_shared<const FullSpectrum>(build_hamiltonian(L, U, b)));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

  void release(const Key& k) {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(k);
    if (it != entries_.end() && --it->second.remaining <= 0) entries_.erase(it);
  }

 private:
  struct Entry {
    std::shared_future<std::shared_ptr<const FullSpectrum>> future;
    int remaining = 0;
  };
  std::mutex mutex_;
  std::map<Key, Entry> entries_;
};

constexpr int kLargestOptimizedGlobal = 6;

// theta = 0 on the easy-axis side, pi/2 on the easy-plane side, both at U = 0
std::vector<MeasurementAngles> fixed_global_candidates(double U) {
  std::vector<MeasurementAngles> c;
  if (U <= 0.0) c.push_back(MeasurementAngles::real(0.0, 0.0, 0.0));
  if (U >= 0.0) c.push_back(MeasurementAngles::real(std::numbers::pi / 2, 0.0, 0.0));
  return c;
}

template <class State>
DiscordResult global_for(const RunConfig& cfg, const WorkItem& item, const State& state) {
  if (item.L > kLargestOptimizedGlobal && !cfg.full_opt) {
    const auto candidates = fixed_global_candidates(item.U);
    return global_discord_at(state, candidates);
  }
  return global_discord(state, !cfg.independent_angles, cfg.optimizer);
}

void fill(ResultRecord& r, const DiscordResult& d) {
  r.value = d.value;
  if (!d.angles.empty()) r.angles = d.angles.front();
}

DiscordResult pair_discord(const RunConfig& cfg, const DensityMatrix& rho_ab) {
  if (cfg.kind == DiscordKind::asymmetric) return asymmetric_discord(rho_ab, cfg.optimizer);
  return symmetric_discord(rho_ab, cfg.mode, cfg.optimizer);
}

std::vector<ResultRecord> evaluate(const RunConfig& cfg, const WorkItem& item, SpectrumCache* cache) {
  auto rows = row_skeletons(cfg, item);
  const auto h = build_hamiltonian(item.L, item.U, item.boundary);

  if (cfg.command == Command::spectrum) {
    const auto slice = low_spectrum(h, cfg.levels);
    for (std::size_t n = 0; n < rows.size(); ++n) {
      rows[n].value = slice.energies.at(n);
      rows[n].degenerate = static_cast<bool>(slice.degeneracy_flags.at(n));
      rows[n].gs_energy = slice.energies.front();
    }
    return rows;
  }

  if (cfg.command == Command::sweep) {
    const auto gs = ground_state(h);
    for (auto& r : rows) {
      if (cfg.kind == DiscordKind::global) {
        fill(r, global_for(cfg, item, gs.state));
      } else {
        fill(r, pair_discord(cfg, reduced_pair_state(gs.state, *r.pair_i, *r.pair_j)));
      }
      r.degenerate = gs.degenerate;
      r.gs_energy = gs.energy;
    }
    return rows;
  }

  // thermal
  const Key key{item.L, item.U, item.boundary};
  std::shared_ptr<const FullSpectrum> spectrum =
      cache ? cache->get(key) : std::make_shared<const FullSpectrum>(h);
  const auto levels = spectrum->energies();
  std::vector<double> sorted(levels.data(), levels.data() + levels.size());
  std::sort(sorted.begin(), sorted.end());
  const bool degenerate = sorted.size() > 1 && sorted[1] - sorted[0] < kDegeneracyGap;

  const DensityMatrix rho = thermal_state(*spectrum, *item.T);
  for (auto& r : rows) {
    if (cfg.kind == DiscordKind::global) {
      fill(r, global_for(cfg, item, rho));
    } else {
      fill(r, pair_discord(cfg, reduced_pair_state(rho, *r.pair_i, *r.pair_j)));
    }
    r.degenerate = degenerate;
    r.gs_energy = spectrum->ground_energy();
  }
  if (cache) cache->release(key);
  return rows;
}

bool same_inputs(const ResultRecord& a, const ResultRecord& b) {
  return a.L == b.L && a.boundary == b.boundary && a.U == b.U && a.T == b.T &&
         a.pair_i == b.pair_i && a.pair_j == b.pair_j && a.kind == b.kind && a.mode == b.mode;
}

// Keeps the complete rows of an earlier run that cover whole items and
// match the plan. Returns the number of items already done.
std::size_t prepare_resume(const RunConfig& cfg, const std::vector<WorkItem>& items,
                           std::size_t& rows_kept) {
  rows_kept = 0;
  std::ifstream in(cfg.out, std::ios::binary);
  if (!in) return 0;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  in.close();

  const std::string header = std::string(kCsvHeader) + "\n";
  if (content.size() < header.size()) {
    if (header.compare(0, content.size(), content) != 0) {
      throw ConfigError("resume", cfg.out + " does not start with the expected header");
    }
    std::filesystem::resize_file(cfg.out, 0);
    return 0;
  }
  if (content.compare(0, header.size(), header) != 0) {
    throw ConfigError("resume", cfg.out + " does not start with the expected header");
  }

  std::vector<std::string> lines;
  std::vector<std::size_t> ends;  // byte offset just past each complete line
  std::size_t pos = header.size();
  while (true) {
    const auto nl = content.find('\n', pos);
    if (nl == std::string::npos) break;
    lines.push_back(content.substr(pos, nl - pos));
    ends.push_back(nl + 1);
    pos = nl + 1;
  }

  std::size_t done = 0, row = 0;
  for (const auto& item : items) {
    const auto expected = row_skeletons(cfg, item);
    if (row + expected.size() > lines.size()) break;
    for (const auto& e : expected) {
      ResultRecord got;
      try {
        got = parse_record(lines[row]);
      } catch (const std::invalid_argument& err) {
        throw ConfigError("resume", cfg.out + " row " + std::to_string(row + 2) + ": " + err.what());
      }
      if (!same_inputs(got, e)) {
        throw ConfigError("resume", cfg.out + " row " + std::to_string(row + 2) +
                                        " does not match this configuration");
      }
      ++row;
    }
    ++done;
  }
  const std::size_t keep = row == 0 ? header.size() : ends[row - 1];
  std::filesystem::resize_file(cfg.out, keep);
  rows_kept = row;
  return done;
}

}  // namespace

std::vector<WorkItem> plan_work(const RunConfig& cfg) {
  std::vector<WorkItem> items;
  for (int L : cfg.lengths) {
    const Boundary b = L == 2 ? Boundary::open : cfg.boundary;
    for (double U : cfg.u_values) {
      if (cfg.command == Command::thermal) {
        for (double T : cfg.t_values) items.push_back({L, b, U, T});
      } else {
        items.push_back({L, b, U, std::nullopt});
      }
    }
  }
  return items;
}

std::vector<ResultRecord> row_skeletons(const RunConfig& cfg, const WorkItem& item) {
  ResultRecord base;
  base.L = item.L;
  base.boundary = to_string(item.boundary);
  base.U = item.U;
  base.T = item.T;

  std::vector<ResultRecord> rows;
  if (cfg.command == Command::spectrum) {
    for (int n = 0; n < cfg.levels; ++n) {
      rows.push_back(base);
      rows.back().kind = "E" + std::to_string(n);
    }
    return rows;
  }
  base.kind = to_string(cfg.kind);
  switch (cfg.kind) {
    case DiscordKind::global: base.mode = "real"; break;
    case DiscordKind::asymmetric: base.mode = "full"; break;
    case DiscordKind::symmetric: base.mode = to_string(cfg.mode); break;
  }
  if (cfg.kind == DiscordKind::global) return {base};
  for (const auto& p : cfg.pairs) {
    const auto [i, j] = p.resolve(item.L, item.boundary);
    rows.push_back(base);
    rows.back().pair_i = i;
    rows.back().pair_j = j;
  }
  return rows;
}

std::vector<ResultRecord> evaluate_item(const RunConfig& cfg, const WorkItem& item) {
  return evaluate(cfg, item, nullptr);
}

RunSummary run_sweep(const RunConfig& cfg) {
  if (cfg.command == Command::scaling) throw ConfigError("command", "scaling is not a sweep");
  cfg.validate();

  const auto items = plan_work(cfg);
  if (cfg.boundary == Boundary::periodic) {
    for (int L : cfg.lengths) {
      if (L == 2) {
        std::cerr << "note: L=2 has a single bond; written as an open chain\n";
        break;
      }
    }
  }

  RunSummary summary;
  std::size_t first = 0;
  if (cfg.resume) first = prepare_resume(cfg, items, summary.rows_resumed);

  std::ofstream out;
  const bool append = cfg.resume && std::filesystem::exists(cfg.out) &&
                      std::filesystem::file_size(cfg.out) > 0;
  if (append) {
    out.open(cfg.out, std::ios::binary | std::ios::app);
  } else {
    out.open(cfg.out, std::ios::binary | std::ios::trunc);
    if (out) out << kCsvHeader << '\n' << std::flush;
  }
  if (!out) throw ConfigError("out", "cannot write " + cfg.out);

  SpectrumCache cache;
  if (cfg.command == Command::thermal) {
    for (std::size_t k = first; k < items.size(); ++k) {
      cache.expect({items[k].L, items[k].U, items[k].boundary});
    }
  }

  const std::size_t n = items.size() - first;
  std::vector<std::vector<ResultRecord>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<char> ready(n, 0);
  std::mutex mutex;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    while (!stop) {
      const std::size_t k = next++;
      if (k >= n) return;
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<ResultRecord> rows;
      std::exception_ptr err;
      try {
        rows = evaluate(cfg, items[first + k], &cache);
      } catch (...) {
        err = std::current_exception();
        stop = true;
      }
      if (cfg.timing) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& r : rows) r.seconds = s;
      }
      {
        std::lock_guard lock(mutex);
        results[k] = std::move(rows);
        errors[k] = err;
        ready[k] = 1;
      }
      cv.notify_all();
    }
  };

  const int nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);

  std::exception_ptr failure;
  for (std::size_t k = 0; k < n; ++k) {
    std::unique_lock lock(mutex);
    // items are claimed in order, so every index up to a failure completes
    cv.wait(lock, [&] { return ready[k] != 0; });
    if (errors[k]) {
      failure = errors[k];
      break;
    }
    auto rows = std::move(results[k]);
    lock.unlock();
    for (const auto& r : rows) out << format_record(r) << '\n';
    out.flush();
    summary.rows_written += rows.size();
  }
  stop = true;
  cv.notify_all();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return summary;
}

}  // namespace s1d
