#include "mpcert/penalization.hpp"

#include <cmath>
#include <mutex>
#include <limits>
#include <unordered_map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mpcert {

// Branch layout of f~(r, .) on (0, covered_to]: branches[i] holds on
// (cuts[i-1], cuts[i]], with cuts[-1] = 0.
struct PenalizedNonlinearity::Pieces {
  std::vector<double> cuts;
  std::vector<int> branches;
  int blocks = 0;
  double covered_to = 0.0;
  double r = kNaN;  // the radius these cuts belong to
  bool failed = false;
};

// Published layouts are immutable; readers go through an atomic slot table
// without locking, writers serialise on the mutex and never free while alive.
struct PenalizedNonlinearity::Cache {
  struct Slots {
    explicit Slots(std::size_t size) : n(size), p(new std::atomic<const Pieces*>[size]) {
      for (std::size_t i = 0; i < n; ++i) p[i].store(nullptr, std::memory_order_relaxed);
    }
    std::size_t n;
    std::unique_ptr<std::atomic<const Pieces*>[]> p;
  };

  std::mutex mu;
  std::atomic<const Slots*> slots{nullptr};
  std::vector<std::unique_ptr<Slots>> tables;
  std::vector<std::unique_ptr<Pieces>> owned;
  std::unordered_map<std::size_t, const Pieces*> overflow;

  const Pieces* find(std::size_t node) {
    const Slots* s = slots.load(std::memory_order_acquire);
    if (s && node < s->n) return s->p[node].load(std::memory_order_acquire);
    std::lock_guard lock(mu);
    const auto it = overflow.find(node);
    return it == overflow.end() ? nullptr : it->second;
  }

  void publish(std::size_t node, Pieces pc) {
    std::lock_guard lock(mu);
    const Pieces* cur = nullptr;
    const Slots* s = slots.load(std::memory_order_relaxed);
    if (s && node < s->n)
      cur = s->p[node].load(std::memory_order_relaxed);
    else if (auto it = overflow.find(node); it != overflow.end())
      cur = it->second;
    if (cur && cur->r == pc.r && cur->blocks >= pc.blocks) return;
    owned.push_back(std::make_unique<Pieces>(std::move(pc)));
    if (s && node < s->n)
      s->p[node].store(owned.back().get(), std::memory_order_release);
    else
      overflow[node] = owned.back().get();
  }

  void reserve(std::size_t n) {
    std::lock_guard lock(mu);
    const Slots* s = slots.load(std::memory_order_relaxed);
    if (s && s->n >= n) return;
    auto fresh = std::make_unique<Slots>(n);
    if (s)
      for (std::size_t i = 0; i < s->n; ++i) fresh->p[i].store(s->p[i].load(std::memory_order_relaxed));
    for (auto it = overflow.begin(); it != overflow.end();) {
      if (it->first < n) {
        fresh->p[it->first].store(it->second);
        it = overflow.erase(it);
      } else {
        ++it;
      }
    }
    slots.store(fresh.get(), std::memory_order_release);
    tables.push_back(std::move(fresh));
  }
};

namespace {

// Scan blocks: block b covers [10^(-10+16b), 10^(6+16b)] with 256 log-spaced nodes.
constexpr int kScanNodes = 256;
constexpr int kBlocks = 20;
constexpr double kEdges[kBlocks + 1] = {1e-10, 1e6,   1e22,  1e38,  1e54,  1e70,  1e86,
                                        1e102, 1e118, 1e134, 1e150, 1e166, 1e182, 1e198,
                                        1e214, 1e230, 1e246, 1e262, 1e278, 1e294, kInf};

double block_hi(int b) { return kEdges[b + 1]; }

// log-spaced scan nodes of every block, computed once
const std::vector<double>& scan_nodes() {
  static const std::vector<double> nodes = [] {
    std::vector<double> t(static_cast<std::size_t>(kBlocks) * kScanNodes);
    for (int b = 0; b < kBlocks; ++b) {
      const double lo = kEdges[b], hi = std::min(kEdges[b + 1], std::numeric_limits<double>::max());
      const double ratio = std::pow(hi / lo, 1.0 / (kScanNodes - 1));
      for (int j = 0; j < kScanNodes; ++j) t[b * kScanNodes + j] = j == kScanNodes - 1 ? hi : lo * std::pow(ratio, j);
    }
    return t;
  }();
  return nodes;
}

int blocks_needed(double s) {
  int needed = 1;
  while (needed < kBlocks && block_hi(needed - 1) < s) ++needed;
  return needed;
}

}  // namespace

PenalizedNonlinearity::PenalizedNonlinearity(const ProblemSpec& spec)
    : k_(0.0),
      odd_(spec.odd),
      R_(spec.radius_R),
      V_(spec.V()),
      f_(spec.f()),
      cache_(std::make_unique<Cache>()),
      fallbacks_(std::make_unique<std::atomic<std::size_t>>(0)) {
  if (!(spec.theta > 2.0)) throw DomainError("make_penalized: theta must be > 2");
  k_ = 2.0 * spec.theta / (spec.theta - 2.0);
}

PenalizedNonlinearity::~PenalizedNonlinearity() = default;
PenalizedNonlinearity::PenalizedNonlinearity(PenalizedNonlinearity&&) noexcept = default;
PenalizedNonlinearity& PenalizedNonlinearity::operator=(PenalizedNonlinearity&&) noexcept = default;

PenalizedNonlinearity make_penalized(const ProblemSpec& spec) { return PenalizedNonlinearity(spec); }

// -1 lower clamp, 0 f itself, +1 upper clamp; ties go to the middle
int PenalizedNonlinearity::branch(double Vr, double r, double t) const {
  const double kf = k_ * f_(r, t);
  if (kf < -Vr * t) return -1;
  if (kf <= Vr * t) return 0;
  return 1;
}

double PenalizedNonlinearity::f_tilde_pos(double Vr, double r, double s) const {
  const double fs = f_(r, s);
  const double kf = k_ * fs;
  if (kf < -Vr * s) return -Vr * s / k_;
  if (kf <= Vr * s) return fs;
  return Vr * s / k_;
}

double PenalizedNonlinearity::f_tilde(double r, double s) const {
  if (s > 0.0) return f_tilde_pos(V_(r), r, s);
  if (s < 0.0 && odd_) return -f_tilde_pos(V_(r), r, -s);
  return 0.0;
}

double PenalizedNonlinearity::g(double r, double s) const {
  if (r <= R_) return f_(r, s);
  return f_tilde(r, s);
}

double PenalizedNonlinearity::g(double r, double Vr, double s) const {
  if (r <= R_) return f_(r, s);
  if (s > 0.0) return f_tilde_pos(Vr, r, s);
  if (s < 0.0 && odd_) return -f_tilde_pos(Vr, r, -s);
  return 0.0;
}

void PenalizedNonlinearity::scan_block(double Vr, double r, int b, Pieces& pc) const {
  const double* nodes = scan_nodes().data() + static_cast<std::ptrdiff_t>(b) * kScanNodes;
  double a = nodes[0];
  int ba = branch(Vr, r, a);
  if (pc.branches.empty()) pc.branches.push_back(ba);
  for (int j = 1; j < kScanNodes; ++j) {
    const double t = nodes[j];
    const int bt = branch(Vr, r, t);
    int guard = 0;
    while (ba != bt) {
      if (++guard > 8) {
        pc.failed = true;
        break;
      }
      double x = a, y = t;
      for (int it = 0; it < 200 && y - x > 1e-14 * y; ++it) {
        const double m = 0.5 * (x + y);
        (branch(Vr, r, m) == ba ? x : y) = m;
      }
      pc.cuts.push_back(0.5 * (x + y));
      a = y;
      ba = branch(Vr, r, y);
      pc.branches.push_back(ba);
    }
    a = t;
    ba = bt;
  }
  pc.blocks = b + 1;
  pc.covered_to = nodes[kScanNodes - 1];
}

double PenalizedNonlinearity::integrate(double Vr, double r, const Pieces& pc, double s) const {
  double total = 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < pc.branches.size() && a < s; ++i) {
    const double b = i < pc.cuts.size() ? std::min(pc.cuts[i], s) : s;
    switch (pc.branches[i]) {
      case 0: total += f_.primitive(r, b) - f_.primitive(r, a); break;
      case 1: total += Vr * (b * b - a * a) / (2.0 * k_); break;
      default: total -= Vr * (b * b - a * a) / (2.0 * k_); break;
    }
    a = b;
  }
  return total;
}

double PenalizedNonlinearity::G_pos(double Vr, double r, double s, std::size_t node, bool use_cache) const {
  const int needed = blocks_needed(s);

  if (use_cache) {
    const Pieces* hit = cache_->find(node);
    // a node index reused on another grid misses here and gets overwritten
    if (hit && hit->r == r && hit->blocks >= needed && !hit->failed) return integrate(Vr, r, *hit, s);
  }

  Pieces pc;
  pc.r = r;
  for (int b = 0; b < needed && !pc.failed; ++b) scan_block(Vr, r, b, pc);

  if (pc.failed) {
    fallbacks_->fetch_add(1);
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double t) { return t > 0.0 ? f_tilde_pos(Vr, r, t) : 0.0; };
    return gauss_kronrod<double, 61>::integrate(integrand, 0.0, s, 30, 1e-14);
  }
  const double value = integrate(Vr, r, pc, s);
  if (use_cache) cache_->publish(node, std::move(pc));
  return value;
}

double PenalizedNonlinearity::G(double r, double s) const {
  if (r <= R_) return f_.primitive(r, s);
  if (s > 0.0) return G_pos(V_(r), r, s, 0, false);
  if (s < 0.0 && odd_) return G_pos(V_(r), r, -s, 0, false);
  return 0.0;
}

double PenalizedNonlinearity::G_node(std::size_t node, double r, double Vr, double s) const {
  const bool interface = on_interface(r);
  if (r <= R_ && !interface) return f_.primitive(r, s);
  double tilde = 0.0;
  if (s > 0.0)
    tilde = G_pos(Vr, r, s, node, true);
  else if (s < 0.0 && odd_)
    tilde = G_pos(Vr, r, -s, node, true);
  // trapezoid across the jump at |x| = R: the node takes the mean of both sides
  return interface ? 0.5 * (f_.primitive(r, s) + tilde) : tilde;
}

double PenalizedNonlinearity::g_node(double r, double Vr, double s) const {
  if (!on_interface(r)) return g(r, Vr, s);
  double tilde = 0.0;
  if (s > 0.0)
    tilde = f_tilde_pos(Vr, r, s);
  else if (s < 0.0 && odd_)
    tilde = -f_tilde_pos(Vr, r, -s);
  return 0.5 * (f_(r, s) + tilde);
}

double PenalizedNonlinearity::G_node(std::size_t node, double r, double s) const {
  return G_node(node, r, V_(r), s);
}

void PenalizedNonlinearity::reserve_nodes(std::size_t n) const { cache_->reserve(n); }

}  // namespace mpcert
