#include "wolfsearch/config.hpp"

#include "wolfsearch/csv.hpp"

#include <algorithm>
#include <set>

namespace wolfsearch::config {

using nlohmann::json;

namespace {

//! Reads keys from one JSON object and rejects any key left unread.
class Object
{
public:
  Object(const json& j, std::string path)
    : j_(j)
    , path_(std::move(path))
  {
    if (!j_.is_object())
      throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(const std::string& key)
  {
    seen_.insert(key);
    if (!j_.contains(key))
      throw ConfigError(where(key) + ": missing required key");
    return j_.at(key);
  }

  const json* find(const std::string& key)
  {
    seen_.insert(key);
    if (!has(key))
      return nullptr;
    return &j_.at(key);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  template<class T>
  T get(const std::string& key)
  {
    return convert<T>(at(key), where(key));
  }

  template<class T>
  std::optional<T> maybe(const std::string& key)
  {
    const json* v = find(key);
    if (!v)
      return std::nullopt;
    return convert<T>(*v, where(key));
  }

  template<class T>
  T get_or(const std::string& key, T fallback)
  {
    return maybe<T>(key).value_or(fallback);
  }

  void finish() const
  {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key))
        throw ConfigError(where(key) + ": unknown key");
    }
  }

  template<class T>
  static T convert(const json& v, const std::string& where)
  {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean())
        throw ConfigError(where + ": expected a boolean");
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError(where + ": expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer())
        throw ConfigError(where + ": expected an integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number())
        throw ConfigError(where + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string())
        throw ConfigError(where + ": expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array())
        throw ConfigError(where + ": expected an array of numbers");
      for (const auto& x : v) {
        if (!x.is_number())
          throw ConfigError(where + ": expected an array of numbers");
      }
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array())
        throw ConfigError(where + ": expected an array of strings");
      for (const auto& x : v) {
        if (!x.is_string())
          throw ConfigError(where + ": expected an array of strings");
      }
    }
    return v.get<T>();
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

RealVector to_vector(const std::vector<double>& v, const std::string& where)
{
  try {
    return RealVector(v);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

MatcherKind parse_matcher_kind(const std::string& s, const std::string& where)
{
  if (s == "cosine")
    return MatcherKind::cosine;
  if (s == "neg_euclidean")
    return MatcherKind::neg_euclidean;
  if (s == "external")
    return MatcherKind::external;
  throw ConfigError(where + ": unknown matcher kind '" + s + "'");
}

void parse_matcher(const json& j, const std::string& where, MatcherKind& kind,
                   std::optional<oracle::Endpoint>& endpoint)
{
  Object o(j, where);
  kind = parse_matcher_kind(o.get<std::string>("kind"), o.where("kind"));
  if (const json* oj = o.find("oracle")) {
    endpoint = parse_endpoint(*oj, o.where("oracle"));
    endpoint->verbs = {oracle::Verb::match};
  }
  if (kind == MatcherKind::external && !endpoint)
    throw ConfigError(where + ": external matcher requires an 'oracle' section");
  o.finish();
}

synth::Cluster parse_cluster(const json& j, const std::string& where)
{
  Object o(j, where);
  synth::Cluster c{to_vector(o.get<std::vector<double>>("center"), o.where("center")),
                   o.get<double>("sigma"), o.get<double>("weight")};
  o.finish();
  return c;
}

} // namespace

oracle::Endpoint parse_endpoint(const json& j, const std::string& where)
{
  Object o(j, where);
  oracle::Endpoint e;
  e.command = o.get<std::vector<std::string>>("command");
  if (e.command.empty())
    throw ConfigError(o.where("command") + ": must not be empty");
  e.timeout_ms = o.get_or<int>("timeout_ms", 10000);
  e.pool_size = o.get_or<std::size_t>("pool_size", 1);
  o.finish();
  return e;
}

GeneratorSpec parse_generator(const json& j)
{
  Object o(j, "generator");
  GeneratorSpec g;
  const std::string kind = o.get<std::string>("kind");
  if (kind == "identity")
    g.kind = GeneratorKind::identity;
  else if (kind == "affine")
    g.kind = GeneratorKind::affine;
  else if (kind == "cluster_warp")
    g.kind = GeneratorKind::cluster_warp;
  else if (kind == "external")
    g.kind = GeneratorKind::external;
  else
    throw ConfigError("generator.kind: unknown generator kind '" + kind + "'");
  g.latent_dim = o.get<std::size_t>("latent_dim");
  g.embed_dim = o.get<std::size_t>("embed_dim");

  if (const json* aj = o.find("affine")) {
    Object a(*aj, "generator.affine");
    const json& rows = a.at("matrix");
    if (!rows.is_array())
      throw ConfigError("generator.affine.matrix: expected an array of rows");
    AffineMap map;
    map.matrix.resize(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = Object::convert<std::vector<double>>(
        rows[r], "generator.affine.matrix[" + std::to_string(r) + "]");
      if (static_cast<Eigen::Index>(row.size()) != map.matrix.cols())
        throw ConfigError("generator.affine.matrix: ragged rows");
      for (std::size_t c = 0; c < row.size(); ++c)
        map.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    const auto bias = a.maybe<std::vector<double>>("bias")
                        .value_or(std::vector<double>(static_cast<std::size_t>(map.matrix.rows()), 0.0));
    map.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    a.finish();
    g.affine = std::move(map);
  }
  if (const json* wj = o.find("warp")) {
    Object w(*wj, "generator.warp");
    ClusterWarp warp;
    const json& cs = w.at("centroids");
    if (!cs.is_array())
      throw ConfigError("generator.warp.centroids: expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "generator.warp.centroids[" + std::to_string(i) + "]";
      warp.centroids.push_back(to_vector(Object::convert<std::vector<double>>(cs[i], where), where));
    }
    warp.tau = w.get<double>("tau");
    w.finish();
    g.warp = std::move(warp);
  }
  if (const json* oj = o.find("oracle")) {
    auto e = parse_endpoint(*oj, "generator.oracle");
    e.verbs = {oracle::Verb::gen};
    e.latent_dim = g.latent_dim;
    e.embed_dim = g.embed_dim;
    g.external = std::move(e);
  }
  o.finish();
  g.validate();
  return g;
}

synth::MixtureSpec SynthSection::mixture(std::uint64_t seed) const
{
  synth::MixtureSpec spec;
  spec.embed_dim = embed_dim;
  spec.identities = identities;
  spec.items_per_identity = items_per_identity;
  spec.within_identity_sigma = within_identity_sigma;
  spec.seed = seed + seed_offset::mixture;
  if (const auto* explicit_clusters = std::get_if<std::vector<synth::Cluster>>(&clusters))
    spec.clusters = *explicit_clusters;
  else
    spec.clusters = synth::make_clusters(std::get<synth::ClusterLayout>(clusters), embed_dim,
                                         seed + seed_offset::layout);
  if (shift) {
    require_same_dim(shift->size(), embed_dim, "synth.shift");
    for (auto& c : spec.clusters) {
      std::vector<double> moved(c.center.begin(), c.center.end());
      for (std::size_t i = 0; i < moved.size(); ++i)
        moved[i] += (*shift)[i];
      c.center = RealVector(std::move(moved));
    }
  }
  return spec;
}

std::filesystem::path Experiment::resolve(const std::filesystem::path& p) const
{
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<SystemSection> Experiment::systems_for(const std::optional<std::string>& setting) const
{
  if (!setting)
    return systems;
  const auto it = settings.find(*setting);
  if (it == settings.end())
    throw ConfigError("setting '" + *setting + "' is not defined under 'settings'");
  std::vector<SystemSection> out;
  for (const auto& name : it->second) {
    auto found = std::find_if(systems.begin(), systems.end(),
                              [&](const SystemSection& s) { return s.name == name; });
    if (found == systems.end())
      throw ConfigError("settings." + *setting + ": unknown system '" + name + "'");
    out.push_back(*found);
  }
  if (out.empty())
    throw ConfigError("settings." + *setting + ": lists no systems");
  return out;
}

Experiment parse_experiment(const json& doc, std::filesystem::path base_dir)
{
  Object root(doc, "config");
  Experiment ex;
  ex.base_dir = std::move(base_dir);
  ex.seed = root.get_or<std::uint64_t>("seed", 0);

  if (const json* sj = root.find("synth")) {
    Object s(*sj, "synth");
    SynthSection syn;
    syn.embed_dim = s.get<std::size_t>("embed_dim");
    syn.identities = s.get<std::size_t>("identities");
    syn.items_per_identity = s.get<std::size_t>("items_per_identity");
    syn.within_identity_sigma = s.get<double>("within_identity_sigma");
    syn.dev_fraction = s.get_or<double>("dev_fraction", 0.5);
    syn.surrogate_identities = s.get_or<std::size_t>("surrogate_identities", 0);
    syn.shift = s.maybe<std::vector<double>>("shift");
    const bool has_clusters = s.has("clusters");
    const bool has_layout = s.has("layout");
    if (has_clusters == has_layout)
      throw ConfigError("synth: give exactly one of 'clusters' or 'layout'");
    if (has_clusters) {
      const json& cs = s.at("clusters");
      if (!cs.is_array())
        throw ConfigError("synth.clusters: expected an array");
      std::vector<synth::Cluster> list;
      for (std::size_t i = 0; i < cs.size(); ++i)
        list.push_back(parse_cluster(cs[i], "synth.clusters[" + std::to_string(i) + "]"));
      syn.clusters = std::move(list);
      s.find("layout");
    } else {
      Object l(s.at("layout"), "synth.layout");
      synth::ClusterLayout layout;
      layout.count = l.get<std::size_t>("count");
      layout.offset_norm = l.get<double>("offset_norm");
      layout.spread = l.get<double>("spread");
      layout.sigma = l.get<double>("sigma");
      layout.weights = l.get_or<std::vector<double>>("weights", {});
      l.finish();
      syn.clusters = layout;
      s.find("clusters");
    }
    s.finish();
    ex.synth = std::move(syn);
  }

  if (const json* gj = root.find("generator"))
    ex.generator = parse_generator(*gj);

  if (const json* sys = root.find("systems")) {
    if (!sys->is_array())
      throw ConfigError("config.systems: expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < sys->size(); ++i) {
      const std::string where = "systems[" + std::to_string(i) + "]";
      Object o((*sys)[i], where);
      SystemSection s;
      s.name = o.get_or<std::string>("name", "system_" + std::to_string(i + 1));
      if (!names.insert(s.name).second)
        throw ConfigError(where + ": duplicate system name '" + s.name + "'");
      parse_matcher(o.at("matcher"), o.where("matcher"), s.matcher_kind, s.oracle);
      s.enrollment = o.get<std::string>("enrollment");
      s.weight = o.get_or<double>("weight", 1.0);
      if (const json* t = o.find("threshold")) {
        if (t->is_string() && t->get<std::string>() == "eer")
          s.threshold.reset();
        else
          s.threshold = Object::convert<double>(*t, o.where("threshold"));
      }
      o.finish();
      ex.systems.push_back(std::move(s));
    }
  }

  if (const json* st = root.find("settings")) {
    Object o(*st, "settings");
    for (const auto& [name, value] : st->items())
      ex.settings[name] = o.get<std::vector<std::string>>(name);
    o.finish();
  }

  if (const json* lj = root.find("lve")) {
    Object o(*lj, "lve");
    ex.lve.population = o.get_or<std::size_t>("population", 22);
    ex.lve.iterations = o.get_or<std::size_t>("iterations", 1000);
    ex.lve.sigma0 = o.get_or<double>("sigma0", 0.5);
    ex.lve.threads = o.get_or<std::size_t>("threads", 1);
    ex.lve.fmr_trace = o.get_or<bool>("fmr_trace", true);
    ex.lve.conflict_probe = o.get_or<bool>("conflict_probe", true);
    ex.lve.max_pairs = o.get_or<std::size_t>("max_pairs", 1'000'000);
    o.finish();
  }

  if (const json* ej = root.find("eval")) {
    Object o(*ej, "eval");
    EvalSection e;
    if (auto p = o.maybe<std::string>("dev"))
      e.dev = *p;
    if (auto p = o.maybe<std::string>("eval"))
      e.eval = *p;
    if (const json* mj = o.find("matcher"))
      parse_matcher(*mj, "eval.matcher", e.matcher_kind, e.oracle);
    e.max_pairs = o.get_or<std::size_t>("max_pairs", 1'000'000);
    if (auto p = o.maybe<std::string>("reference"))
      e.reference = *p;
    e.bandwidth = o.maybe<double>("bandwidth");
    e.normalize = o.maybe<bool>("normalize");
    o.finish();
    ex.eval = std::move(e);
  }

  if (const json* oj = root.find("output")) {
    Object o(*oj, "output");
    if (auto p = o.maybe<std::string>("dir"))
      ex.output.dir = *p;
    ex.output.indent = o.get_or<int>("indent", 2);
    o.finish();
  }

  root.finish();
  return ex;
}

Experiment load_experiment(const std::filesystem::path& path)
{
  json doc;
  try {
    doc = json::parse(csv::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_experiment(doc, path.parent_path());
}

} // namespace wolfsearch::config
