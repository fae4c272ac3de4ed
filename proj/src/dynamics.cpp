#include "pks/dynamics.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pks {

BoundarySample sample_boundary(const PksParams& p, double a, double b, Rng& rng) {
  if (!(a > 0 && b > 0)) throw ParameterError("box sides must be positive");
  BoundarySample out;
  const auto draw = [&](const IntensityMeasure& m, double len, Axis axis,
                        std::vector<BoundaryAtom>& into) {
    const long n = std::poisson_distribution<long>(len * m.mass())(rng);
    into.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      BoundaryAtom at;
      at.axis = axis;
      at.coordinate = uniform(rng, 0.0, len);
      at.intensity = m.sample(rng);
      into.push_back(at);
    }
  };
  draw(p.vertical, a, Axis::X, out.x_atoms);
  draw(p.horizontal, b, Axis::Y, out.y_atoms);
  return out;
}

std::vector<SpontaneousAtom> sample_spontaneous(const PksParams& p, double a, double b, Rng& rng) {
  std::vector<SpontaneousAtom> out;
  if (p.p_annihilation == 0.0) return out;
  if (!p.atomic())
    throw ParameterError("p_0 > 0 requires atomic measures (creation has probability 0 otherwise)");
  const double rate = a * b * p.p_annihilation * convolution_at(p, 0.0);
  if (!(rate > 0.0)) return out;
  const long n = std::poisson_distribution<long>(rate)(rng);
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    SpontaneousAtom at;
    at.x = uniform(rng, 0.0, a);
    at.y = uniform(rng, 0.0, b);
    at.intensity = crossing_kernel_sample(p, 0.0, rng);
    out.push_back(at);
  }
  return out;
}

Sweep::Sweep(const PksParams& p, double a, double b, SimulationOptions opt)
    : p_(p), a_(a), b_(b), opt_(opt) {
  if (!(a > 0 && b > 0)) throw ParameterError("box sides must be positive");
  int e = 0;
  std::frexp(std::max(a, b), &e);
  quantum_ = std::ldexp(1.0, e - 53);
  d_.a = a;
  d_.b = b;
  d_.kind = p.kind();
  d_.step = p.step();
}

double Sweep::snap(double v) const { return std::round(v / quantum_) * quantum_; }

void Sweep::note(std::string text) { d_.notes.push_back(std::move(text)); }

double Sweep::free_x(double x) {
  while (particles_.count(x)) {
    std::ostringstream os;
    os << "coordinate collision at x=" << x << ", moved by one quantum";
    note(os.str());
    x += quantum_;
  }
  return x;
}

int Sweep::add_node(double x, double y, NodeKind k) {
  Node n;
  n.position = {x, y};
  n.kind = k;
  d_.nodes.push_back(n);
  return static_cast<int>(d_.nodes.size()) - 1;
}

void Sweep::close_vertical(double x, double y0, double y1, double s, int from, int to) {
  Segment seg;
  seg.orientation = Orientation::Vertical;
  seg.lo = {x, y0};
  seg.hi = {x, y1};
  seg.intensity = s;
  const int id = static_cast<int>(d_.segments.size());
  d_.segments.push_back(seg);
  d_.nodes[static_cast<std::size_t>(from)].adjacent[N] = id;
  d_.nodes[static_cast<std::size_t>(to)].adjacent[S] = id;
}

void Sweep::close_horizontal(double y, double x0, double x1, double s, int from, int to) {
  Segment seg;
  seg.orientation = Orientation::Horizontal;
  seg.lo = {x0, y};
  seg.hi = {x1, y};
  seg.intensity = s;
  const int id = static_cast<int>(d_.segments.size());
  d_.segments.push_back(seg);
  d_.nodes[static_cast<std::size_t>(from)].adjacent[E] = id;
  d_.nodes[static_cast<std::size_t>(to)].adjacent[W] = id;
}

void Sweep::enter_vertical(double x, double s) {
  x = std::clamp(snap(x), quantum_, a_ - quantum_);
  x = free_x(x);
  const int node = add_node(x, 0.0, NodeKind::VE);
  particles_.emplace(x, Particle{s, 0.0, node, 0});
}

void Sweep::enter_horizontal(double y, double s) {
  y = std::clamp(snap(y), quantum_, b_ - quantum_);
  queue_.push(Event{y, 0.0, Entry, seq_++, 0, s});
}

void Sweep::spontaneous(double x, double y, double t) {
  x = std::clamp(snap(x), quantum_, a_ - quantum_);
  y = std::clamp(snap(y), quantum_, b_ - quantum_);
  queue_.push(Event{y, x, Spawn, seq_++, 0, t});
}

void Sweep::schedule(double x, Particle& part, Rng& rng) {
  part.token = ++token_;
  const double ds = exponential(rng, split_rate_vertical(p_, part.intensity));
  const double dt =
      exponential(rng, opt_.vertical_turn_factor * turn_rate_vertical(p_, part.intensity));
  const double d = std::min(ds, dt);
  if (!std::isfinite(d)) return;
  double y = snap(part.y0 + d);
  if (y <= part.y0) y = part.y0 + quantum_;
  if (y >= b_) return;
  queue_.push(Event{y, x, ds < dt ? Split : Turn, seq_++, part.token, 0.0});
}

double Sweep::kernel(double s, Rng& rng) {
  double t = crossing_kernel_sample(p_, s, rng);
  const IntensityMeasure& v = p_.vertical;
  const IntensityMeasure& h = p_.horizontal;
  if (p_.atomic()) {
    if (!(h.density(t) > 0.0) || !(v.density(s - t) > 0.0)) {
      std::ostringstream os;
      os << "kernel produced t=" << t << " outside the support at s=" << s;
      throw InternalError(os.str());
    }
    return t;
  }
  const double lo = std::max(h.lo(), s - v.hi()), hi = std::min(h.hi(), s - v.lo());
  if (t < lo || t > hi) {
    std::ostringstream os;
    os << "kernel draw t=" << t << " outside [" << lo << "," << hi << "] at s=" << s
       << "; clamped";
    note(os.str());
    t = std::clamp(t, lo, hi);
  }
  return t;
}

void Sweep::propagate_horizontal(double x, double y, double s, int from, Rng& rng) {
  for (;;) {
    if (p_.atomic() ? !(p_.horizontal.density(s) > 0.0)
                    : (s < p_.horizontal.lo() || s > p_.horizontal.hi())) {
      std::ostringstream os;
      os << "horizontal intensity " << s << " outside the support of the horizontal measure";
      throw InternalError(os.str());
    }
    const double ds = exponential(rng, split_rate_horizontal(p_, s));
    const double dt = exponential(rng, turn_rate_horizontal(p_, s));
    const auto it = particles_.upper_bound(x);
    const double x_next = it == particles_.end() ? a_ : it->first;
    const double d = std::min(ds, dt);
    if (std::isfinite(d)) {
      double xe = snap(x + d);
      if (xe <= x) xe = x + quantum_;
      if (xe < x_next) {
        if (ds < dt) {
          const double t = kernel(s, rng);
          const int node = add_node(xe, y, NodeKind::VB);
          close_horizontal(y, x, xe, s, from, node);
          auto& part = particles_.emplace(xe, Particle{s - t, y, node, 0}).first->second;
          schedule(xe, part, rng);
          s = t;
          x = xe;
          from = node;
          continue;
        }
        const int node = add_node(xe, y, NodeKind::VT);
        close_horizontal(y, x, xe, s, from, node);
        auto& part = particles_.emplace(xe, Particle{s, y, node, 0}).first->second;
        schedule(xe, part, rng);
        return;
      }
    }
    if (it == particles_.end()) {
      const int node = add_node(a_, y, NodeKind::HS);
      close_horizontal(y, x, a_, s, from, node);
      return;
    }
    // Rule 3: the front meets the vertical line at x_next.
    Particle& part = it->second;
    const double sum = s + part.intensity;
    const double u = uniform01(rng);
    const double pv = p_.pv(sum), ph = p_.ph(sum);
    const double p0 = (p_.atomic() && sum == 0.0) ? p_.p_annihilation : 0.0;
    const auto meet = [&](NodeKind k) {
      const int node = add_node(x_next, y, k);
      close_horizontal(y, x, x_next, s, from, node);
      close_vertical(x_next, part.y0, y, part.intensity, part.node, node);
      return node;
    };
    if (u < pv) {
      part.node = meet(NodeKind::HA);
      part.intensity = sum;
      part.y0 = y;
      schedule(x_next, part, rng);
      return;
    }
    if (u < pv + ph) {
      from = meet(NodeKind::VA);
      particles_.erase(it);
      s = sum;
      x = x_next;
      continue;
    }
    if (u < pv + ph + p0) {
      meet(NodeKind::OA);
      particles_.erase(it);
      return;
    }
    const double t = kernel(sum, rng);
    const int node = meet(NodeKind::CC);
    part.node = node;
    part.intensity = sum - t;
    part.y0 = y;
    schedule(x_next, part, rng);
    s = t;
    x = x_next;
    from = node;
  }
}

Drawing Sweep::run(Rng& rng) {
  for (auto& [x, part] : particles_) schedule(x, part, rng);
  while (!queue_.empty()) {
    Event ev = queue_.top();
    if (ev.y >= b_) break;
    queue_.pop();
    Particle* part = nullptr;
    if (ev.kind == Split || ev.kind == Turn) {
      const auto it = particles_.find(ev.x);
      if (it == particles_.end() || it->second.token != ev.token) continue;  // stale
      part = &it->second;
    }
    if (ev.y <= last_level_) {
      // Two horizontal lines may not share a y-level.
      std::ostringstream os;
      os << "y-level collision at y=" << ev.y << ", event moved up";
      note(os.str());
      ev.y = last_level_ + quantum_;
      queue_.push(ev);
      continue;
    }
    last_level_ = ev.y;
    switch (ev.kind) {
      case Entry: {
        const int node = add_node(0.0, ev.y, NodeKind::HE);
        propagate_horizontal(0.0, ev.y, ev.s, node, rng);
        break;
      }
      case Spawn: {
        const double x = free_x(ev.x);
        const int node = add_node(x, ev.y, NodeKind::OB);
        auto& np = particles_.emplace(x, Particle{-ev.s, ev.y, node, 0}).first->second;
        schedule(x, np, rng);
        propagate_horizontal(x, ev.y, ev.s, node, rng);
        break;
      }
      case Split: {
        const double s = part->intensity;
        const double t = kernel(s, rng);
        const int node = add_node(ev.x, ev.y, NodeKind::HB);
        close_vertical(ev.x, part->y0, ev.y, s, part->node, node);
        part->intensity = s - t;
        part->y0 = ev.y;
        part->node = node;
        schedule(ev.x, *part, rng);
        propagate_horizontal(ev.x, ev.y, t, node, rng);
        break;
      }
      case Turn: {
        const double s = part->intensity;
        const int node = add_node(ev.x, ev.y, NodeKind::HT);
        close_vertical(ev.x, part->y0, ev.y, s, part->node, node);
        particles_.erase(ev.x);
        propagate_horizontal(ev.x, ev.y, s, node, rng);
        break;
      }
      default: break;
    }
  }
  for (const auto& [x, part] : particles_) {
    const int node = add_node(x, b_, NodeKind::VS);
    close_vertical(x, part.y0, b_, part.intensity, part.node, node);
  }
  particles_.clear();
  return std::move(d_);
}

Drawing simulate(const PksParams& p, double a, double b, std::uint64_t seed,
                 const SimulationOptions& opt) {
  if (const auto v = validate(p); !v.ok())
    throw ParameterError("invalid parameters:\n" + v.describe());
  Rng rng(seed);
  const BoundarySample bs = sample_boundary(p, a, b, rng);
  const auto spont = sample_spontaneous(p, a, b, rng);
  Sweep sweep(p, a, b, opt);
  for (const auto& at : bs.x_atoms) sweep.enter_vertical(at.coordinate, at.intensity);
  for (const auto& at : bs.y_atoms) sweep.enter_horizontal(at.coordinate, at.intensity);
  for (const auto& at : spont) sweep.spontaneous(at.x, at.y, at.intensity);
  Drawing d = sweep.run(rng);
  d.seed = seed;
  d.params_digest = params_digest(p);
  return d;
}

}  // namespace pks
