#include "dgs/stream.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "dgs/random.hpp"

namespace dgs {

// ---------------------------------------------------------------- ledger

void SpaceLedger::charge(const std::string& module, std::size_t bytes) {
  std::lock_guard lock(mu_);
  current_[module] += bytes;
}

void SpaceLedger::close_pass() {
  std::lock_guard lock(mu_);
  std::size_t total = 0;
  for (const auto& [module, bytes] : current_) {
    total += bytes;
    auto& peak = module_peak_[module];
    peak = std::max(peak, bytes);
  }
  peak_ = std::max(peak_, total);
  current_.clear();
  ++closed_;
}

std::size_t SpaceLedger::peak_bytes() const {
  std::lock_guard lock(mu_);
  return peak_;
}

std::map<std::string, std::size_t> SpaceLedger::module_peaks() const {
  std::lock_guard lock(mu_);
  return module_peak_;
}

std::size_t SpaceLedger::current_bytes() const {
  std::lock_guard lock(mu_);
  std::size_t total = 0;
  for (const auto& [module, bytes] : current_) total += bytes;
  return total;
}

std::size_t SpaceLedger::closed_passes() const {
  std::lock_guard lock(mu_);
  return closed_;
}

// ---------------------------------------------------------------- parsing

namespace {

struct ParsedStream {
  Vertex n = 0;
  bool weighted = false;
  std::vector<EdgeUpdate> updates;
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

Vertex parse_vertex(const std::string& tok, Vertex n, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(line, "bad vertex id '" + tok + "'");
  }
  unsigned long long value = 0;
  try {
    value = std::stoull(tok);
  } catch (const std::exception&) {
    throw ParseError(line, "bad vertex id '" + tok + "'");
  }
  if (value < 1 || value > n) throw ParseError(line, "vertex id " + tok + " outside [1, n]");
  return static_cast<Vertex>(value);
}

ParsedStream parse_stream(std::istream& in) {
  ParsedStream out;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const auto tokens = split_ws(raw);
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() != 3 || tokens[0] != "DGS1") {
        throw ParseError(line_no, "expected header 'DGS1 <n> weighted|unweighted'");
      }
      if (tokens[1].find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(line_no, "bad vertex count '" + tokens[1] + "'");
      }
      const unsigned long long n = std::stoull(tokens[1]);
      if (n < 1 || n > 0xfffffffeULL) throw ParseError(line_no, "vertex count out of range");
      out.n = static_cast<Vertex>(n);
      if (tokens[2] == "weighted") {
        out.weighted = true;
      } else if (tokens[2] != "unweighted") {
        throw ParseError(line_no, "expected 'weighted' or 'unweighted'");
      }
      have_header = true;
      continue;
    }
    const std::size_t expected = out.weighted ? 4 : 3;
    if (tokens.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                    std::to_string(tokens.size()));
    }
    EdgeUpdate e;
    if (tokens[0] == "+") {
      e.sign = +1;
    } else if (tokens[0] == "-") {
      e.sign = -1;
    } else {
      throw ParseError(line_no, "sign must be '+' or '-'");
    }
    e.u = parse_vertex(tokens[1], out.n, line_no);
    e.v = parse_vertex(tokens[2], out.n, line_no);
    if (e.u == e.v) throw ParseError(line_no, "self-loop");
    if (out.weighted) {
      try {
        e.weight = Weight::parse(tokens[3]);
      } catch (const std::exception& ex) {
        throw ParseError(line_no, ex.what());
      }
      if (e.weight < Weight::from_int(1)) throw ParseError(line_no, "weight below 1");
    }
    out.updates.push_back(e);
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  return out;
}

ParsedStream parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stream file " + path.string());
  return parse_stream(in);
}

std::size_t default_cap(Vertex n) {
  return MultipassStream::kDefaultCapFactor * static_cast<std::size_t>(n) * n;
}

}  // namespace

// ---------------------------------------------------------------- stream

MultipassStream::MultipassStream(Vertex n, bool weighted, std::vector<EdgeUpdate> updates)
    : n_(n), weighted_(weighted), cap_(default_cap(n)) {
  if (n < 1) throw std::invalid_argument("stream needs n >= 1");
  for (const auto& e : updates) {
    if (e.u < 1 || e.u > n || e.v < 1 || e.v > n) throw std::invalid_argument("endpoint outside [1, n]");
    if (e.u == e.v) throw std::invalid_argument("self-loop in stream");
    if (e.sign != 1 && e.sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  }
  if (updates.size() > cap_) throw std::length_error("stream longer than the length cap");
  data_ = std::make_shared<const std::vector<EdgeUpdate>>(std::move(updates));
}

MultipassStream MultipassStream::open_file(const std::filesystem::path& path) {
  const ParsedStream parsed = parse_file(path);
  MultipassStream s;
  s.n_ = parsed.n;
  s.weighted_ = parsed.weighted;
  s.cap_ = default_cap(parsed.n);
  s.file_ = path;
  if (parsed.updates.size() > s.cap_) throw std::length_error("stream longer than the length cap");
  return s;
}

MultipassStream MultipassStream::replay() const {
  MultipassStream s;
  s.n_ = n_;
  s.weighted_ = weighted_;
  s.data_ = data_;
  s.file_ = file_;
  s.permute_seed_ = permute_seed_;
  s.cap_ = cap_;
  return s;
}

MultipassStream MultipassStream::permuted(std::uint64_t seed) const {
  MultipassStream s = replay();
  s.permute_seed_ = seed;
  return s;
}

void MultipassStream::set_length_cap(std::size_t cap) {
  if (length() > cap) throw std::length_error("stream longer than the requested cap");
  cap_ = cap;
}

std::vector<EdgeUpdate> MultipassStream::load_base() const {
  if (data_) return *data_;
  ParsedStream parsed = parse_file(file_);
  if (parsed.n != n_ || parsed.weighted != weighted_) {
    throw std::runtime_error("stream file changed between passes: " + file_.string());
  }
  return std::move(parsed.updates);
}

std::vector<EdgeUpdate> MultipassStream::updates() const { return load_base(); }

std::size_t MultipassStream::length() const { return data_ ? data_->size() : load_base().size(); }

void MultipassStream::begin_pass() {
  if (in_pass_) throw std::logic_error("begin_pass inside an open pass");
  in_pass_ = true;
  pass_buffer_ = load_base();
  if (permute_seed_) {
    Rng rng(derive_seed(*permute_seed_, {0x7065726dULL, passes_}));
    rng.shuffle(pass_buffer_.begin(), pass_buffer_.end());
  }
}

std::span<const EdgeUpdate> MultipassStream::pass_updates() const {
  if (!in_pass_) throw std::logic_error("pass_updates outside a pass");
  return pass_buffer_;
}

void MultipassStream::end_pass() {
  if (!in_pass_) throw std::logic_error("end_pass without begin_pass");
  in_pass_ = false;
  ++passes_;
  ledger_->close_pass();
  pass_buffer_.clear();
  pass_buffer_.shrink_to_fit();
}

void MultipassStream::run_pass(const PassConsumer& consume) {
  begin_pass();
  try {
    consume(pass_updates());
  } catch (...) {
    end_pass();
    throw;
  }
  end_pass();
}

// ---------------------------------------------------------------- pass group

struct PassGroup::Impl {
  class Participant final : public PassSource {
   public:
    Participant(Impl& owner, std::size_t index) : owner_(owner), index_(index) {}
    Vertex vertex_count() const override { return owner_.base.vertex_count(); }
    bool weighted() const override { return owner_.base.weighted(); }
    void run_pass(const PassConsumer& consume) override { owner_.request(index_, consume); }
    std::size_t passes_taken() const override { return owner_.base.passes_taken(); }
    SpaceLedger& ledger() override { return owner_.base.ledger(); }

   private:
    Impl& owner_;
    std::size_t index_;
  };

  explicit Impl(PassSource& b, std::size_t count)
      : base(b), pending(count, nullptr), errors(count), left(count, false), active(count) {
    for (std::size_t i = 0; i < count; ++i) participants.push_back(std::make_unique<Participant>(*this, i));
  }

  void run_locked() {
    try {
      base.run_pass([&](std::span<const EdgeUpdate> updates) {
        for (std::size_t j = 0; j < pending.size(); ++j) {
          if (pending[j] == nullptr) continue;
          try {
            (*pending[j])(updates);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        }
      });
    } catch (...) {
      for (std::size_t j = 0; j < pending.size(); ++j) {
        if (pending[j] != nullptr && !errors[j]) errors[j] = std::current_exception();
      }
    }
    std::fill(pending.begin(), pending.end(), nullptr);
    waiting = 0;
    ++generation;
    cv.notify_all();
  }

  void request(std::size_t i, const PassConsumer& consume) {
    std::unique_lock lock(mu);
    if (left[i]) throw std::logic_error("participant requested a pass after leaving");
    pending[i] = &consume;
    ++waiting;
    const std::uint64_t gen = generation;
    if (waiting == active) {
      run_locked();
    } else {
      cv.wait(lock, [&] { return generation != gen; });
    }
    if (errors[i]) {
      auto err = errors[i];
      errors[i] = nullptr;
      std::rethrow_exception(err);
    }
  }

  void leave(std::size_t i) {
    std::unique_lock lock(mu);
    if (left[i]) return;
    left[i] = true;
    --active;
    if (waiting > 0 && waiting == active) run_locked();
  }

  PassSource& base;
  std::vector<std::unique_ptr<Participant>> participants;
  std::vector<const PassConsumer*> pending;
  std::vector<std::exception_ptr> errors;
  std::vector<bool> left;
  std::size_t active;
  std::size_t waiting = 0;
  std::uint64_t generation = 0;
  std::mutex mu;
  std::condition_variable cv;
};

PassGroup::PassGroup(PassSource& base, std::size_t participants)
    : impl_(std::make_unique<Impl>(base, participants)) {}

PassGroup::~PassGroup() = default;

PassSource& PassGroup::participant(std::size_t i) { return *impl_->participants.at(i); }

void PassGroup::leave(std::size_t i) { impl_->leave(i); }

void run_interleaved(PassSource& base, const std::vector<std::function<void(PassSource&)>>& jobs) {
  if (jobs.empty()) return;
  if (jobs.size() == 1) {
    jobs[0](base);
    return;
  }
  PassGroup group(base, jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<std::thread> threads;
  threads.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    threads.emplace_back([&, i] {
      try {
        jobs[i](group.participant(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
      group.leave(i);
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------- generator

namespace {

Weight draw_weight(std::uint64_t seed, std::uint64_t pair, const GeneratorOptions& o) {
  if (!o.weighted) return Weight::from_int(1);
  const std::int64_t max_int = std::max<std::int64_t>(1, o.max_weight.ticks() / Weight::kScale);
  Rng rng(derive_seed(seed, {0x77656967ULL, pair}));
  if (o.distribution == WeightDistribution::Uniform) {
    return Weight::from_int(static_cast<std::int64_t>(rng.between(1, static_cast<std::uint64_t>(max_int))));
  }
  const double x = std::exp(rng.unit() * std::log(static_cast<double>(max_int) + 1.0));
  const auto w = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x)), 1, max_int);
  return Weight::from_int(w);
}

std::pair<Vertex, Vertex> random_pair(Rng& rng, Vertex n) {
  const auto u = static_cast<Vertex>(rng.between(1, n));
  auto v = static_cast<Vertex>(rng.between(1, n - 1));
  if (v >= u) ++v;
  return {std::min(u, v), std::max(u, v)};
}

}  // namespace

MultipassStream generate_stream(const GeneratorOptions& o) {
  if (o.n < 2) throw std::invalid_argument("generate_stream needs n >= 2");
  if (o.churn < 0) throw std::invalid_argument("churn must be non-negative");
  if (o.max_weight < Weight::from_int(1)) throw std::invalid_argument("max_weight must be >= 1");
  const std::uint64_t all_pairs = static_cast<std::uint64_t>(o.n) * (o.n - 1) / 2;
  if (o.target_edges > all_pairs) throw std::invalid_argument("target_edges exceeds n(n-1)/2");

  Rng rng(derive_seed(o.seed, {0x67656eULL}));
  std::vector<std::pair<Vertex, Vertex>> finals;
  finals.reserve(o.target_edges);
  if (o.target_edges * 2 > all_pairs) {
    std::vector<std::pair<Vertex, Vertex>> every;
    every.reserve(all_pairs);
    for (Vertex u = 1; u <= o.n; ++u)
      for (Vertex v = u + 1; v <= o.n; ++v) every.emplace_back(u, v);
    rng.shuffle(every.begin(), every.end());
    finals.assign(every.begin(), every.begin() + static_cast<std::ptrdiff_t>(o.target_edges));
  } else {
    std::unordered_set<std::uint64_t> seen;
    while (finals.size() < o.target_edges) {
      const auto p = random_pair(rng, o.n);
      if (seen.insert(pair_index(p.first, p.second, o.n)).second) finals.push_back(p);
    }
  }

  const auto churn_pairs = static_cast<std::size_t>(std::llround(o.churn * static_cast<double>(o.target_edges)));
  struct Event {
    Vertex u, v;
    std::int64_t churn_id;  // -1 for a final insert
  };
  std::vector<Event> events;
  events.reserve(finals.size() + 2 * churn_pairs);
  for (const auto& [u, v] : finals) events.push_back({u, v, -1});
  for (std::size_t c = 0; c < churn_pairs; ++c) {
    const auto p = random_pair(rng, o.n);
    events.push_back({p.first, p.second, static_cast<std::int64_t>(c)});
    events.push_back({p.first, p.second, static_cast<std::int64_t>(c)});
  }
  rng.shuffle(events.begin(), events.end());

  std::vector<std::uint8_t> opened(churn_pairs, 0);
  std::vector<EdgeUpdate> updates;
  updates.reserve(events.size());
  for (const auto& ev : events) {
    EdgeUpdate e;
    // Randomize endpoint order so that consumers cannot rely on u < v.
    const bool flip = rng.bernoulli(0.5);
    e.u = flip ? ev.v : ev.u;
    e.v = flip ? ev.u : ev.v;
    e.weight = draw_weight(o.seed, pair_index(ev.u, ev.v, o.n), o);
    if (ev.churn_id < 0) {
      e.sign = +1;
    } else {
      auto& open = opened[static_cast<std::size_t>(ev.churn_id)];
      e.sign = open ? -1 : +1;
      open = 1;
    }
    updates.push_back(e);
  }
  return MultipassStream(o.n, o.weighted, std::move(updates));
}

// ---------------------------------------------------------------- validation

TurnstileReport validate_strict_turnstile(PassSource& stream) {
  struct Track {
    std::int64_t mult = 0;
    std::int64_t min_seen = 0;
    Weight weight;
    bool weight_set = false;
    bool weight_conflict = false;
  };
  const Vertex n = stream.vertex_count();
  std::unordered_map<std::uint64_t, Track> tracks;
  TurnstileReport report;
  std::size_t length = 0;
  stream.run_pass([&](std::span<const EdgeUpdate> updates) {
    length = updates.size();
    for (const auto& e : updates) {
      if (e.u < 1 || e.u > n || e.v < 1 || e.v > n || e.u == e.v) {
        report.violations.push_back({TurnstileViolation::Kind::BadEndpoint, e.u, e.v, 0, 0});
        continue;
      }
      auto& t = tracks[edge_name(e.u, e.v)];
      t.mult += e.sign;
      t.min_seen = std::min(t.min_seen, t.mult);
      if (!t.weight_set) {
        t.weight = e.weight;
        t.weight_set = true;
      } else if (t.weight != e.weight) {
        t.weight_conflict = true;
      }
    }
  });
  std::vector<std::pair<std::uint64_t, Track>> sorted(tracks.begin(), tracks.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto floor = -static_cast<std::int64_t>(length);
  for (const auto& [name, t] : sorted) {
    const Vertex u = edge_name_low(name);
    const Vertex v = edge_name_high(name);
    if (t.mult != 0 && t.mult != 1) {
      report.violations.push_back({TurnstileViolation::Kind::FinalMultiplicity, u, v, t.mult, t.min_seen});
    }
    if (t.min_seen < floor) {
      report.violations.push_back({TurnstileViolation::Kind::Underflow, u, v, t.mult, t.min_seen});
    }
    if (t.weight_conflict) {
      report.violations.push_back({TurnstileViolation::Kind::InconsistentWeight, u, v, t.mult, t.min_seen});
    }
    if (t.mult == 1) ++report.final_edges;
  }
  report.ok = report.violations.empty();
  return report;
}

// ---------------------------------------------------------------- files

void save_stream(const MultipassStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write stream file " + path.string());
  out << "DGS1 " << stream.vertex_count() << (stream.weighted() ? " weighted" : " unweighted") << '\n';
  for (const auto& e : stream.updates()) {
    out << (e.sign > 0 ? '+' : '-') << ' ' << e.u << ' ' << e.v;
    if (stream.weighted()) out << ' ' << e.weight.to_string();
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

MultipassStream load_stream(const std::filesystem::path& path) {
  ParsedStream parsed = parse_file(path);
  return MultipassStream(parsed.n, parsed.weighted, std::move(parsed.updates));
}

StreamStats stream_stats(PassSource& stream) {
  StreamStats stats;
  stats.n = stream.vertex_count();
  std::unordered_map<std::uint64_t, std::int64_t> mult;
  stream.run_pass([&](std::span<const EdgeUpdate> updates) {
    stats.updates = updates.size();
    for (const auto& e : updates) {
      mult[edge_name(e.u, e.v)] += e.sign;
      stats.max_weight = std::max(stats.max_weight, e.weight);
    }
  });
  for (const auto& [name, m] : mult) stats.final_edges += (m == 1);
  stats.lambda_bound = Weight::from_ticks(stats.max_weight.ticks() * static_cast<std::int64_t>(stats.n - 1));
  return stats;
}

Weight auto_lambda(PassSource& stream) {
  Weight max_w = Weight::zero();
  stream.run_pass([&](std::span<const EdgeUpdate> updates) {
    for (const auto& e : updates) max_w = std::max(max_w, e.weight);
  });
  return Weight::from_ticks(max_w.ticks() * static_cast<std::int64_t>(stream.vertex_count() - 1));
}

}  // namespace dgs
