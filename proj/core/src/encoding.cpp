#include "dgs/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

#include "dgs/random.hpp"

namespace dgs {

namespace {

std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

__int128 cross(const Point& o, const Point& a, const Point& b) {
  return static_cast<__int128>(a.x - o.x) * (b.y - o.y) - static_cast<__int128>(a.y - o.y) * (b.x - o.x);
}

std::uint64_t point_key(const Point& p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint32_t>(p.y);
}

constexpr std::int64_t kDenseIndexLimit = std::int64_t{1} << 22;
constexpr std::uint32_t kCodebookMagic = 0x31534943;  // "CIS1"

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<Point> disc_hull_vertices(std::int64_t radius) {
  if (radius < 1) throw std::invalid_argument("disc radius must be >= 1");
  std::vector<Point> candidates;
  candidates.reserve(static_cast<std::size_t>(4 * radius + 2));
  const std::int64_t r2 = radius * radius;
  for (std::int64_t x = -radius; x <= radius; ++x) {
    const std::int64_t y = isqrt(r2 - x * x);
    candidates.push_back({x, y});
    if (y != 0) candidates.push_back({x, -y});
  }
  std::vector<Point> ccw = convex_hull(std::move(candidates));
  const auto start = std::find(ccw.begin(), ccw.end(), Point{radius, 0});
  if (start == ccw.end()) throw std::logic_error("disc hull misses (R, 0)");
  const auto s = static_cast<std::size_t>(start - ccw.begin());
  std::vector<Point> cw;
  cw.reserve(ccw.size());
  for (std::size_t i = 0; i < ccw.size(); ++i) cw.push_back(ccw[(s + ccw.size() - i) % ccw.size()]);
  return cw;
}

CisCodebook::CisCodebook(std::int64_t radius, std::vector<Point> points)
    : radius_(radius), points_(std::move(points)) {
  index_points();
}

void CisCodebook::index_points() {
  upper_.clear();
  lower_.clear();
  sparse_.clear();
  if (2 * radius_ + 1 <= kDenseIndexLimit) {
    upper_.assign(static_cast<std::size_t>(2 * radius_ + 1), 0);
    lower_.assign(static_cast<std::size_t>(2 * radius_ + 1), 0);
    for (std::uint32_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      auto& slot = p.y >= 0 ? upper_[static_cast<std::size_t>(p.x + radius_)]
                            : lower_[static_cast<std::size_t>(p.x + radius_)];
      slot = i + 1;
    }
  } else {
    for (std::uint32_t i = 0; i < points_.size(); ++i) sparse_.emplace(point_key(points_[i]), i + 1);
  }
}

CisCodebook CisCodebook::build(std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("codebook needs n >= 1");
  auto radius = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), 1.5)));
  radius = std::max<std::int64_t>(radius, 1);
  for (;;) {
    std::vector<Point> hull = disc_hull_vertices(radius);
    if (hull.size() >= n) {
      hull.resize(n);
      return CisCodebook(radius, std::move(hull));
    }
    radius *= 2;
  }
}

const Point& CisCodebook::at(std::uint32_t i) const {
  if (i < 1 || i > points_.size()) throw std::out_of_range("codeword index outside [1, n]");
  return points_[i - 1];
}

std::uint32_t CisCodebook::index_of(const Point& p) const {
  if (p.x < -radius_ || p.x > radius_ || p.y < -radius_ || p.y > radius_) return 0;
  std::uint32_t idx = 0;
  if (!upper_.empty()) {
    idx = p.y >= 0 ? upper_[static_cast<std::size_t>(p.x + radius_)] : lower_[static_cast<std::size_t>(p.x + radius_)];
  } else {
    auto it = sparse_.find(point_key(p));
    if (it != sparse_.end()) idx = it->second;
  }
  if (idx == 0 || points_[idx - 1] != p) return 0;
  return idx;
}

std::uint32_t CisCodebook::decode(std::int64_t sum_x, std::int64_t sum_y, std::int64_t count) const {
  if (count <= 0) return 0;
  if (sum_x % count != 0 || sum_y % count != 0) return 0;
  return index_of({sum_x / count, sum_y / count});
}

void CisCodebook::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write codebook " + path.string());
  const std::uint32_t magic = kCodebookMagic;
  const std::uint64_t count = points_.size();
  out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
  out.write(reinterpret_cast<const char*>(&radius_), sizeof radius_);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(points_.data()), static_cast<std::streamsize>(count * sizeof(Point)));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CisCodebook CisCodebook::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read codebook " + path.string());
  std::uint32_t magic = 0;
  std::int64_t radius = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof magic);
  in.read(reinterpret_cast<char*>(&radius), sizeof radius);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || magic != kCodebookMagic || radius < 1 || count > (std::uint64_t{1} << 32)) {
    throw std::runtime_error("malformed codebook file " + path.string());
  }
  std::vector<Point> pts(count);
  in.read(reinterpret_cast<char*>(pts.data()), static_cast<std::streamsize>(count * sizeof(Point)));
  if (!in) throw std::runtime_error("truncated codebook file " + path.string());
  for (const auto& p : pts) {
    if (p.x * p.x + p.y * p.y > radius * radius) throw std::runtime_error("codebook point outside disc");
  }
  return CisCodebook(radius, std::move(pts));
}

namespace {

std::mutex g_codebook_mu;
std::map<std::uint32_t, std::shared_ptr<const CisCodebook>> g_codebooks;
std::filesystem::path g_codebook_dir;

}  // namespace

void set_codebook_cache_dir(const std::filesystem::path& dir) {
  std::lock_guard lock(g_codebook_mu);
  g_codebook_dir = dir;
}

std::shared_ptr<const CisCodebook> codebook_for(std::uint32_t n) {
  std::lock_guard lock(g_codebook_mu);
  auto it = g_codebooks.find(n);
  if (it != g_codebooks.end()) return it->second;
  std::shared_ptr<const CisCodebook> cb;
  if (!g_codebook_dir.empty()) {
    const auto file = g_codebook_dir / ("cis-" + std::to_string(n) + ".bin");
    if (std::filesystem::exists(file)) {
      auto loaded = CisCodebook::load(file);
      if (loaded.size() == n) cb = std::make_shared<const CisCodebook>(std::move(loaded));
    }
    if (!cb) {
      cb = std::make_shared<const CisCodebook>(CisCodebook::build(n));
      std::filesystem::create_directories(g_codebook_dir);
      cb->save(file);
    }
  } else {
    cb = std::make_shared<const CisCodebook>(CisCodebook::build(n));
  }
  g_codebooks.emplace(n, cb);
  return cb;
}

// ---------------------------------------------------------------- 1-sparse

void OneSparseSketch::update(const CisCodebook& cb, std::uint32_t i, std::int64_t delta) {
  const Point& p = cb.at(i);
  lx += p.x * delta;
  ly += p.y * delta;
  ctr += delta;
}

void OneSparseSketch::merge(const OneSparseSketch& other) {
  lx += other.lx;
  ly += other.ly;
  ctr += other.ctr;
}

OneSparseResult one_sparse_recover(const OneSparseSketch& sk, const CisCodebook& cb) {
  using Kind = OneSparseResult::Kind;
  if (sk.ctr == 0) {
    if (sk.lx == 0 && sk.ly == 0) return {Kind::Empty, 0, 0};
    throw TurnstileError("1-sparse sketch has zero counter but non-zero sum");
  }
  if (sk.ctr < 0) throw TurnstileError("1-sparse sketch has a negative counter");
  const std::uint32_t idx = cb.decode(sk.lx, sk.ly, sk.ctr);
  if (idx != 0) return {Kind::One, idx, sk.ctr};
  return {Kind::Dense, 0, 0};
}

// ---------------------------------------------------------------- s-sparse

SparseRecovery::SparseRecovery(std::shared_ptr<const CisCodebook> cb, std::size_t s, double delta,
                               std::uint64_t seed)
    : cb_(std::move(cb)), s_(s) {
  if (s < 1) throw std::invalid_argument("sparsity must be >= 1");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("failure probability must lie in (0, 1)");
  rows_ = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(static_cast<double>(s) / delta))));
  buckets_ = 2 * s;
  const std::uint64_t domain = std::max<std::uint32_t>(cb_->size(), 2);
  const PairwiseHash probe = PairwiseHash::sample(domain, 1, 0);
  const int lambda = std::min(62, ceil_log2(probe.p()));
  for (std::size_t r = 0; r < rows_; ++r) {
    hashes_.push_back(PairwiseHash::sample(domain, lambda, derive_seed(seed, {0x73737072ULL, r})));
  }
  cells_.assign(rows_ * buckets_, OneSparseSketch{});
}

void SparseRecovery::update(std::uint32_t i, std::int64_t delta) {
  for (std::size_t r = 0; r < rows_; ++r) {
    const std::size_t b = (hashes_[r](i) - 1) % buckets_;
    cells_[r * buckets_ + b].update(*cb_, i, delta);
  }
}

void SparseRecovery::merge(const SparseRecovery& other) {
  if (other.rows_ != rows_ || other.buckets_ != buckets_ || !(other.hashes_ == hashes_)) {
    throw std::invalid_argument("merging sparse-recovery sketches with different shapes or seeds");
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) cells_[c].merge(other.cells_[c]);
}

std::optional<SparseVector> SparseRecovery::recover() const {
  std::map<std::uint32_t, std::int64_t> found;
  OneSparseSketch total;
  for (std::size_t b = 0; b < buckets_; ++b) total.merge(cells_[b]);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t b = 0; b < buckets_; ++b) {
      const auto res = one_sparse_recover(cells_[r * buckets_ + b], *cb_);
      if (res.kind != OneSparseResult::Kind::One) continue;
      auto [it, inserted] = found.emplace(res.index, res.value);
      if (!inserted && it->second != res.value) {
        throw CorruptionError("rows disagree on the value of coordinate " + std::to_string(res.index));
      }
    }
  }
  // Every coordinate is non-negative, so a zero residual certifies that the
  // union covers the whole support.
  OneSparseSketch residual = total;
  for (const auto& [i, value] : found) residual.update(*cb_, i, -value);
  if (residual.ctr != 0 || residual.lx != 0 || residual.ly != 0) return std::nullopt;
  if (found.size() > s_) return std::nullopt;
  return SparseVector(found.begin(), found.end());
}

std::optional<SparseVector> s_sparse_recover(std::span<const CoordinateUpdate> updates, std::size_t s, double delta,
                                             std::shared_ptr<const CisCodebook> cb, std::uint64_t seed) {
  SparseRecovery rec(std::move(cb), s, delta, seed);
  for (const auto& u : updates) rec.update(u.index, u.delta);
  return rec.recover();
}

// ---------------------------------------------------------------- ℓ0

std::size_t L0Sampler::repetitions_for(double delta) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("failure probability must lie in (0, 1)");
  const double per_rep = 1.0 - std::exp(-1.0) / 2.0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::log(1.0 / delta) / std::log(1.0 / per_rep))));
}

L0Sampler::L0Sampler(std::shared_ptr<const CisCodebook> cb, double delta, std::uint64_t seed)
    : cb_(std::move(cb)), reps_(repetitions_for(delta)) {
  const std::uint32_t n = std::max<std::uint32_t>(cb_->size(), 2);
  lambda_ = ceil_log2(n);
  for (std::size_t t = 0; t < reps_; ++t) {
    for (int j = 0; j <= lambda_; ++j) {
      hashes_.push_back(PairwiseHash::sample(n, lambda_, derive_seed(seed, {0x6c30ULL, t, static_cast<std::uint64_t>(j)})));
    }
  }
  sketches_.assign(hashes_.size(), OneSparseSketch{});
}

void L0Sampler::update(std::uint32_t i, std::int64_t delta) {
  const std::size_t scales = static_cast<std::size_t>(lambda_) + 1;
  for (std::size_t t = 0; t < reps_; ++t) {
    for (int j = 0; j <= lambda_; ++j) {
      const std::size_t k = t * scales + static_cast<std::size_t>(j);
      if (hashes_[k](i) <= (std::uint64_t{1} << (lambda_ - j))) sketches_[k].update(*cb_, i, delta);
    }
  }
}

void L0Sampler::merge(const L0Sampler& other) {
  if (!(other.hashes_ == hashes_)) throw std::invalid_argument("merging l0 samplers with different seeds");
  for (std::size_t k = 0; k < sketches_.size(); ++k) sketches_[k].merge(other.sketches_[k]);
}

OneSparseResult L0Sampler::probe(std::size_t repetition, int scale) const {
  return one_sparse_recover(sketches_.at(repetition * (static_cast<std::size_t>(lambda_) + 1) +
                                        static_cast<std::size_t>(scale)),
                            *cb_);
}

L0Result L0Sampler::sample() const {
  if (probe(0, 0).kind == OneSparseResult::Kind::Empty) return {L0Result::Kind::Empty, 0, 0};
  for (std::size_t t = 0; t < reps_; ++t) {
    for (int j = 0; j <= lambda_; ++j) {
      const auto res = probe(t, j);
      if (res.kind == OneSparseResult::Kind::One) return {L0Result::Kind::Found, res.index, res.value};
    }
  }
  return {L0Result::Kind::Failed, 0, 0};
}

L0Result l0_sample(std::span<const CoordinateUpdate> updates, double delta, std::shared_ptr<const CisCodebook> cb,
                   std::uint64_t seed) {
  L0Sampler sampler(std::move(cb), delta, seed);
  for (const auto& u : updates) sampler.update(u.index, u.delta);
  return sampler.sample();
}

}  // namespace dgs
