#include "wolfsearch/enrollment.hpp"

#include "wolfsearch/csv.hpp"
#include "wolfsearch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace wolfsearch {

EnrollmentSet::EnrollmentSet(std::string name, std::size_t embed_dim, std::vector<Template> templates)
  : name_(std::move(name))
  , embed_dim_(embed_dim)
  , templates_(std::move(templates))
{
  if (embed_dim_ == 0)
    throw ConfigError("enrollment '" + name_ + "': embed_dim must be positive");
  std::set<std::pair<std::string, std::string>> keys;
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    const auto& t = templates_[i];
    if (t.identity.empty())
      throw ConfigError("enrollment '" + name_ + "': template " + std::to_string(i) +
                        " has an empty identity");
    if (t.embedding.dim() != embed_dim_) {
      throw DimensionError("enrollment '" + name_ + "': template " + std::to_string(i) +
                           " has dim " + std::to_string(t.embedding.dim()) + ", expected " +
                           std::to_string(embed_dim_));
    }
    if (!keys.emplace(t.identity, t.item_id).second) {
      throw ConfigError("enrollment '" + name_ + "': duplicate key (" + t.identity + ", " +
                        t.item_id + ") at template " + std::to_string(i));
    }
  }
}

std::vector<Embedding> EnrollmentSet::embeddings() const
{
  std::vector<Embedding> out;
  out.reserve(templates_.size());
  for (const auto& t : templates_)
    out.push_back(t.embedding);
  return out;
}

std::vector<std::string> EnrollmentSet::identities() const
{
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : templates_) {
    if (seen.insert(t.identity).second)
      out.push_back(t.identity);
  }
  return out;
}

EnrollmentSet load_enrollment(const std::filesystem::path& path)
{
  const auto records = csv::parse(csv::read_file(path));
  const std::string where = path.string();
  if (records.empty())
    throw ConfigError(where + ": missing header");
  const auto& header = records[0].fields;
  if (header.size() < 3 || header[0].text != "identity" || header[1].text != "item")
    throw ConfigError(where + ": header must be identity,item,x0,...");
  const std::size_t dim = header.size() - 2;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[k + 2].text != "x" + std::to_string(k))
      throw ConfigError(where + ": header column " + std::to_string(k + 3) + " must be x" +
                        std::to_string(k));
  }

  std::vector<Template> templates;
  std::set<std::pair<std::string, std::string>> keys;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string row = where + ": row " + std::to_string(rec.line);
    if (rec.fields.size() != dim + 2) {
      throw ConfigError(row + ": expected " + std::to_string(dim + 2) + " cells, found " +
                        std::to_string(rec.fields.size()));
    }
    if (rec.fields[0].text.empty())
      throw ConfigError(row + ": empty identity");
    std::vector<double> values(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto& cell = rec.fields[k + 2];
      if (cell.quoted)
        throw ConfigError(row + ": numeric cell x" + std::to_string(k) + " must not be quoted");
      try {
        values[k] = oracle::parse_double(cell.text);
      } catch (const Error&) {
        throw ConfigError(row + ": non-numeric cell x" + std::to_string(k) + " '" + cell.text + "'");
      }
      if (!std::isfinite(values[k]))
        throw ConfigError(row + ": non-finite cell x" + std::to_string(k));
    }
    if (!keys.emplace(rec.fields[0].text, rec.fields[1].text).second) {
      throw ConfigError(row + ": duplicate (identity, item) key (" + rec.fields[0].text + ", " +
                        rec.fields[1].text + ")");
    }
    templates.push_back({rec.fields[0].text, rec.fields[1].text, RealVector(std::move(values))});
  }
  return EnrollmentSet(path.stem().string(), dim, std::move(templates));
}

void save_enrollment(const EnrollmentSet& set, const std::filesystem::path& path)
{
  std::string out = "identity,item";
  for (std::size_t k = 0; k < set.embed_dim(); ++k)
    out += ",x" + std::to_string(k);
  out += '\n';
  for (const auto& t : set.templates()) {
    out += csv::quote(t.identity);
    out += ',';
    out += csv::quote(t.item_id);
    for (double x : t.embedding) {
      out += ',';
      out += oracle::format_double(x);
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

DevEvalSplit split_dev_eval(const EnrollmentSet& set, double dev_fraction, std::uint64_t seed)
{
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    throw ConfigError("split: dev_fraction must lie in (0,1)");
  auto ids = set.identities();
  if (ids.size() < 2)
    throw ConfigError("split: need at least 2 identities, found " + std::to_string(ids.size()));
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  auto n_dev = static_cast<std::size_t>(std::ceil(dev_fraction * static_cast<double>(ids.size())));
  n_dev = std::clamp<std::size_t>(n_dev, 1, ids.size() - 1);
  const std::unordered_set<std::string> dev_ids(ids.begin(), ids.begin() + static_cast<long>(n_dev));

  std::vector<Template> dev;
  std::vector<Template> eval;
  for (const auto& t : set.templates())
    (dev_ids.contains(t.identity) ? dev : eval).push_back(t);
  return {EnrollmentSet(set.name() + "-dev", set.embed_dim(), std::move(dev)),
          EnrollmentSet(set.name() + "-eval", set.embed_dim(), std::move(eval))};
}

namespace {

// Uniform sample of `k` distinct ranks in [0, n), Floyd's algorithm.
std::vector<std::size_t> sample_ranks(std::size_t n, std::size_t k, std::mt19937_64& rng)
{
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  for (std::size_t j = n - k; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (!chosen.insert(t).second)
      chosen.insert(j);
  }
  std::vector<std::size_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

PairSet genuine_impostor_pairs(const EnrollmentSet& set, const PairOptions& options)
{
  if (options.max_pairs == 0)
    throw ConfigError("pairs: max_pairs must be positive");
  PairSet out;
  const auto& ts = set.templates();
  std::unordered_map<std::string, std::size_t> id_index;
  std::vector<std::size_t> label(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    label[i] = id_index.try_emplace(ts[i].identity, id_index.size()).first->second;

  std::vector<std::size_t> per_identity(id_index.size(), 0);
  for (std::size_t l : label)
    ++per_identity[l];
  for (std::size_t c : per_identity)
    out.genuine_total += c * (c - 1) / 2;
  const std::size_t n = ts.size();
  out.impostor_total = (n < 2 ? 0 : n * (n - 1) / 2) - out.genuine_total;

  // Streaming pass: keep every pair, or only the pre-drawn sorted ranks
  // when a list exceeds the cap.
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> genuine_keep;
  std::vector<std::size_t> impostor_keep;
  const bool sample_genuine = out.genuine_total > options.max_pairs;
  const bool sample_impostor = out.impostor_total > options.max_pairs;
  if (sample_genuine)
    genuine_keep = sample_ranks(out.genuine_total, options.max_pairs, rng);
  if (sample_impostor)
    impostor_keep = sample_ranks(out.impostor_total, options.max_pairs, rng);
  out.sampled = sample_genuine || sample_impostor;
  out.genuine.reserve(sample_genuine ? options.max_pairs : out.genuine_total);
  out.impostor.reserve(sample_impostor ? options.max_pairs : out.impostor_total);

  std::size_t g_rank = 0, i_rank = 0, g_next = 0, i_next = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      if (label[i] == label[j]) {
        if (!sample_genuine) {
          out.genuine.push_back({i, j});
        } else if (g_next < genuine_keep.size() && genuine_keep[g_next] == g_rank) {
          out.genuine.push_back({i, j});
          ++g_next;
        }
        ++g_rank;
      } else {
        if (!sample_impostor) {
          out.impostor.push_back({i, j});
        } else if (i_next < impostor_keep.size() && impostor_keep[i_next] == i_rank) {
          out.impostor.push_back({i, j});
          ++i_next;
        }
        ++i_rank;
      }
    }
  }
  return out;
}

} // namespace wolfsearch
