#include "drcover/classify.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace drcover {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < jobs; ++t) {
    std::size_t lo = count * t / jobs, hi = count * (t + 1) / jobs;
    workers.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

ScreenKey screen_key(const CoverGraph& c, const ScreenSelector& screen) {
  const Graph& g = c.graph;
  const std::size_t n = g.order();
  ScreenKey key;
  if (screen.vertex_count) key.push_back(n);
  if (screen.distance_profile) {
    const BitMatrix& adj = g.adjacency();
    const std::size_t words = adj.words();
    std::vector<std::vector<std::uint64_t>> profiles;
    std::vector<std::uint64_t> visited(words), frontier(words), next(words);
    for (Vertex v = 0; v < n; ++v) {
      std::vector<std::uint64_t> hist;
      std::fill(visited.begin(), visited.end(), 0);
      std::fill(frontier.begin(), frontier.end(), 0);
      frontier[v >> 6] = std::uint64_t{1} << (v & 63);
      visited = frontier;
      while (true) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t w = 0; w < words; ++w)
          for (auto word = frontier[w]; word; word &= word - 1) {
            auto row = adj.row(static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word))));
            for (std::size_t j = 0; j < words; ++j) next[j] |= row[j];
          }
        std::uint64_t added = 0;
        for (std::size_t j = 0; j < words; ++j) {
          next[j] &= ~visited[j];
          visited[j] |= next[j];
          added += static_cast<std::uint64_t>(std::popcount(next[j]));
        }
        if (added == 0) break;
        hist.push_back(added);
        frontier.swap(next);
      }
      profiles.push_back(std::move(hist));
    }
    std::sort(profiles.begin(), profiles.end());
    key.push_back(0xd157ULL);
    for (const auto& h : profiles) {
      key.push_back(h.size());
      key.insert(key.end(), h.begin(), h.end());
    }
  }
  if (screen.triangle_profile) {
    const BitMatrix& adj = g.adjacency();
    std::map<std::uint64_t, std::uint64_t> hist;
    for (Vertex v = 0; v < n; ++v) {
      std::uint64_t twice = 0;
      for (Vertex w : g.neighbors(v)) {
        auto a = adj.row(v), b = adj.row(w);
        for (std::size_t j = 0; j < a.size(); ++j) twice += static_cast<std::uint64_t>(std::popcount(a[j] & b[j]));
      }
      ++hist[twice / 2];
    }
    key.push_back(0x7e1ULL);
    for (const auto& [t, k] : hist) {
      key.push_back(t);
      key.push_back(k);
    }
  }
  return key;
}

Classification classify(std::size_t count, const CoverSource& source, const ScreenSelector& screen,
                        unsigned jobs) {
  Classification out;
  out.class_of.assign(count, 0);
  if (count == 0) return out;

  // Pass one: screening keys, plus a base consistency check.
  std::vector<ScreenKey> keys(count);
  std::vector<Graph> base_copy(1);
  std::once_flag base_once;
  std::mutex base_mutex;
  std::exception_ptr mixed;
  parallel_for(count, jobs, [&](std::size_t i) {
    CoverGraph c = source(i);
    std::call_once(base_once, [&] { base_copy[0] = *c.base; });
    if (!(*c.base == base_copy[0])) {
      std::lock_guard lock(base_mutex);
      if (!mixed) mixed = std::make_exception_ptr(ClassifyError("covers do not share one base graph"));
    }
    keys[i] = screen_key(c, screen);
  });
  if (mixed) std::rethrow_exception(mixed);

  std::map<ScreenKey, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < count; ++i) buckets[keys[i]].push_back(i);
  keys.clear();
  keys.shrink_to_fit();
  out.buckets = buckets.size();

  // Pass two: certificates inside shared buckets, merged in index order.
  std::vector<std::size_t> need;
  std::vector<std::size_t> bucket_id(count, 0);
  std::size_t id = 0;
  for (const auto& [key, members] : buckets) {
    for (auto i : members) bucket_id[i] = id;
    if (members.size() > 1) need.insert(need.end(), members.begin(), members.end());
    ++id;
  }
  std::sort(need.begin(), need.end());
  out.certificates_computed = need.size();

  // (bucket, digest) -> classes with that digest; bytes compared exactly.
  std::map<std::pair<std::size_t, std::uint64_t>, std::vector<std::uint32_t>> lookup;
  std::vector<char> needs_cert(count, 0);
  for (auto i : need) needs_cert[i] = 1;

  constexpr std::size_t kChunk = 256;
  std::vector<CanonicalCertificate> chunk_certs;
  std::size_t next_need = 0;
  for (std::size_t base = 0; base < count; base += kChunk) {
    const std::size_t end = std::min(count, base + kChunk);
    std::vector<std::size_t> todo;
    while (next_need < need.size() && need[next_need] < end) todo.push_back(need[next_need++]);
    chunk_certs.assign(todo.size(), {});
    parallel_for(todo.size(), jobs, [&](std::size_t k) {
      chunk_certs[k] = canonical_certificate(augment(source(todo[k])));
    });
    std::size_t k = 0;
    for (std::size_t i = base; i < end; ++i) {
      const std::size_t b = bucket_id[i];
      if (!needs_cert[i]) {
        CoverClass cls;
        cls.representative = i;
        cls.members.push_back(i);
        out.class_of[i] = static_cast<std::uint32_t>(out.classes.size());
        out.classes.push_back(std::move(cls));
        continue;
      }
      CanonicalCertificate& cert = chunk_certs[k++];
      auto& slot = lookup[{b, cert.digest()}];
      std::optional<std::uint32_t> found;
      for (auto cls : slot)
        if (out.classes[cls].certificate->bytes == cert.bytes) found = cls;
      if (found) {
        out.classes[*found].members.push_back(i);
        out.class_of[i] = *found;
      } else {
        CoverClass cls;
        cls.representative = i;
        cls.members.push_back(i);
        cls.certificate = std::move(cert);
        out.class_of[i] = static_cast<std::uint32_t>(out.classes.size());
        slot.push_back(out.class_of[i]);
        out.classes.push_back(std::move(cls));
      }
    }
  }
  return out;
}

Classification classify(const std::vector<CoverGraph>& covers, const ScreenSelector& screen, unsigned jobs) {
  return classify(covers.size(), [&](std::size_t i) { return covers[i]; }, screen, jobs);
}

}  // namespace drcover
