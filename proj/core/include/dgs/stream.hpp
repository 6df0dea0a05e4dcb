#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgs/weight.hpp"

namespace dgs {

struct EdgeUpdate {
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
  int sign = +1;
  Weight weight = Weight::from_int(1);
  // Identity of the underlying stream edge when the update belongs to a
  // derived graph; 0 means the pair (u, v) itself.
  std::uint64_t origin = 0;

  bool operator==(const EdgeUpdate&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Bytes of sketch state held during a pass, per module.
class SpaceLedger {
 public:
  void charge(const std::string& module, std::size_t bytes);
  // Called at every pass boundary: folds the current counters into the peaks
  // and resets them.
  void close_pass();

  std::size_t peak_bytes() const;
  std::map<std::string, std::size_t> module_peaks() const;
  std::size_t current_bytes() const;
  std::size_t closed_passes() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> current_;
  std::map<std::string, std::size_t> module_peak_;
  std::size_t peak_ = 0;
  std::size_t closed_ = 0;
};

using PassConsumer = std::function<void(std::span<const EdgeUpdate>)>;

// Anything that can deliver the update sequence once per pass.
class PassSource {
 public:
  virtual ~PassSource() = default;
  virtual Vertex vertex_count() const = 0;
  virtual bool weighted() const = 0;
  virtual void run_pass(const PassConsumer& consume) = 0;
  virtual std::size_t passes_taken() const = 0;
  virtual SpaceLedger& ledger() = 0;
};

class MultipassStream final : public PassSource {
 public:
  static constexpr std::size_t kDefaultCapFactor = 10;

  MultipassStream(Vertex n, bool weighted, std::vector<EdgeUpdate> updates);
  // Re-reads and re-parses the file on every pass.
  static MultipassStream open_file(const std::filesystem::path& path);

  MultipassStream(MultipassStream&&) noexcept = default;
  MultipassStream& operator=(MultipassStream&&) noexcept = default;

  // A fresh stream over the same updates (pass counter and ledger reset).
  MultipassStream replay() const;
  // Same updates, reshuffled with a per-pass seed derived from `seed`.
  MultipassStream permuted(std::uint64_t seed) const;

  Vertex vertex_count() const override { return n_; }
  bool weighted() const override { return weighted_; }
  std::size_t passes_taken() const override { return passes_; }
  SpaceLedger& ledger() override { return *ledger_; }
  const SpaceLedger& ledger() const { return *ledger_; }

  void begin_pass();
  std::span<const EdgeUpdate> pass_updates() const;
  void end_pass();
  void run_pass(const PassConsumer& consume) override;

  // Offline access in base order; not a pass.
  std::vector<EdgeUpdate> updates() const;
  std::size_t length() const;
  bool is_permuted() const { return permute_seed_.has_value(); }
  bool is_file_backed() const { return !file_.empty(); }

  std::size_t length_cap() const { return cap_; }
  void set_length_cap(std::size_t cap);

 private:
  MultipassStream() = default;
  std::vector<EdgeUpdate> load_base() const;

  Vertex n_ = 0;
  bool weighted_ = false;
  std::shared_ptr<const std::vector<EdgeUpdate>> data_;
  std::filesystem::path file_;
  std::optional<std::uint64_t> permute_seed_;
  std::size_t cap_ = 0;
  std::size_t passes_ = 0;
  bool in_pass_ = false;
  std::vector<EdgeUpdate> pass_buffer_;
  std::unique_ptr<SpaceLedger> ledger_ = std::make_unique<SpaceLedger>();
};

// Several consumers sharing physical passes. Each participant behaves as a
// PassSource; a physical pass runs once every active participant has
// requested one.
class PassGroup {
 public:
  PassGroup(PassSource& base, std::size_t participants);
  ~PassGroup();
  PassGroup(const PassGroup&) = delete;
  PassGroup& operator=(const PassGroup&) = delete;

  PassSource& participant(std::size_t i);
  void leave(std::size_t i);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs each job on its own participant of a shared PassGroup. Rethrows the
// first exception raised by any job.
void run_interleaved(PassSource& base, const std::vector<std::function<void(PassSource&)>>& jobs);

enum class WeightDistribution { Uniform, LogUniform };

struct GeneratorOptions {
  Vertex n = 2;
  std::size_t target_edges = 0;
  double churn = 0.0;
  bool weighted = false;
  Weight max_weight = Weight::from_int(1);
  WeightDistribution distribution = WeightDistribution::Uniform;
  std::uint64_t seed = 0;
};

MultipassStream generate_stream(const GeneratorOptions& options);

struct TurnstileViolation {
  enum class Kind { FinalMultiplicity, Underflow, InconsistentWeight, BadEndpoint };
  Kind kind;
  Vertex u;
  Vertex v;
  std::int64_t final_multiplicity;
  std::int64_t min_intermediate;
};

struct TurnstileReport {
  bool ok = true;
  std::size_t final_edges = 0;
  std::vector<TurnstileViolation> violations;
};

TurnstileReport validate_strict_turnstile(PassSource& stream);

void save_stream(const MultipassStream& stream, const std::filesystem::path& path);
MultipassStream load_stream(const std::filesystem::path& path);

struct StreamStats {
  Vertex n = 0;
  std::size_t updates = 0;
  std::size_t final_edges = 0;
  Weight max_weight = Weight::zero();
  Weight lambda_bound = Weight::zero();
};

// One pass: n, final edge count, max weight and the (n-1)·maxW bound.
StreamStats stream_stats(PassSource& stream);

// One pass accumulating the maximum weight; returns (n-1)·maxW.
Weight auto_lambda(PassSource& stream);

}  // namespace dgs
