#include "libredense/product.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "libredense/detail/hash.hpp"
#include "libredense/rng.hpp"

namespace libredense {

  namespace {

    std::string trim(std::string_view s) {
      std::size_t b = 0;
      std::size_t e = s.size();
      while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
      }
      while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
      }
      return std::string(s.substr(b, e - b));
    }

    std::uint64_t parse_count(std::string const& text, std::string const& what) {
      std::uint64_t value = 0;
      auto const [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || end != text.data() + text.size()) {
        throw ParseError("bad " + what + " \"" + text + "\"");
      }
      return value;
    }

    // Reduced words of length <= half over 2n letters, as a table size.
    double mitm_table_size(std::size_t n, std::size_t bound) {
      double total = 1;
      double layer = 1;
      for (std::size_t k = 1; k <= bound / 2; ++k) {
        layer *= k == 1 ? 2.0 * static_cast<double>(n) : 2.0 * static_cast<double>(n) - 1;
        total += layer;
      }
      return total;
    }

  }  // namespace

  DegreeProfile::DegreeProfile(std::vector<std::uint32_t> degrees, std::size_t reserve_count)
      : degrees_(std::move(degrees)), reserve_(reserve_count) {
    if (degrees_.empty()) {
      throw InvalidArgument("degree profile needs at least one coordinate");
    }
    if (reserve_ > degrees_.size()) {
      throw InvalidArgument("reserve of " + std::to_string(reserve_)
                            + " exceeds the profile size " + std::to_string(degrees_.size()));
    }
    offsets_.push_back(0);
    for (std::uint32_t d : degrees_) {
      if (d == 0) {
        throw InvalidArgument("degrees are positive");
      }
      if (offsets_.back() > UINT32_MAX - d) {
        throw InvalidArgument("degree profile too large");
      }
      offsets_.push_back(offsets_.back() + d);
    }
  }

  std::size_t DegreeProfile::shadow(std::uint32_t l) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(degrees_.begin(), degrees_.end(), [l](std::uint32_t d) { return d >= l; }));
  }

  ProfilePtr make_profile(std::vector<std::uint32_t> degrees, std::size_t reserve_count) {
    return std::make_shared<DegreeProfile const>(std::move(degrees), reserve_count);
  }

  ProfilePtr parse_profile(std::string_view text) {
    std::istringstream         in{std::string(text)};
    std::string                line;
    std::optional<std::size_t> reserve;
    std::vector<std::uint32_t> degrees;
    while (std::getline(in, line)) {
      std::string const t = trim(line);
      if (t.empty() || t[0] == '#') {
        continue;
      }
      if (!reserve) {
        if (t.rfind("reserve=", 0) != 0) {
          throw ParseError("profile must start with reserve=<k>");
        }
        reserve = parse_count(trim(t.substr(8)), "reserve count");
        continue;
      }
      std::uint64_t const d = parse_count(t, "degree");
      if (d == 0 || d > UINT32_MAX) {
        throw ParseError("degree out of range: " + t);
      }
      degrees.push_back(static_cast<std::uint32_t>(d));
    }
    if (!reserve) {
      throw ParseError("profile must start with reserve=<k>");
    }
    try {
      return make_profile(std::move(degrees), *reserve);
    } catch (InvalidArgument const& e) {
      throw ParseError(e.what());
    }
  }

  ProfilePtr load_profile(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw IoError("cannot read profile " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_profile(buf.str());
  }

  std::string to_text(DegreeProfile const& profile) {
    std::string out = "reserve=" + std::to_string(profile.reserve_count()) + "\n";
    for (std::uint32_t d : profile.degrees()) {
      out += std::to_string(d) + "\n";
    }
    return out;
  }

  ProductElement::ProductElement(ProfilePtr profile) : profile_(std::move(profile)) {
    if (!profile_) {
      throw InvalidArgument("product element without a profile");
    }
    images_.resize(profile_->total_points());
    std::iota(images_.begin(), images_.end(), 0U);
  }

  FinPerm ProductElement::coordinate(std::size_t i) const {
    if (i >= profile_->size()) {
      throw IndexOutOfRange("coordinate " + std::to_string(i) + " outside the profile");
    }
    std::uint32_t const        off = profile_->offset(i);
    std::vector<std::uint32_t> images(profile_->degree(i));
    for (std::uint32_t p = 0; p < images.size(); ++p) {
      images[p] = images_[off + p] - off + 1;
    }
    return FinPerm::from_images(std::move(images));
  }

  void ProductElement::set_coordinate(std::size_t i, FinPerm const& f) {
    if (i >= profile_->size()) {
      throw IndexOutOfRange("coordinate " + std::to_string(i) + " outside the profile");
    }
    if (f.degree() != profile_->degree(i)) {
      throw DegreeMismatch("coordinate " + std::to_string(i) + " has degree "
                           + std::to_string(profile_->degree(i)) + ", got "
                           + std::to_string(f.degree()));
    }
    std::uint32_t const off = profile_->offset(i);
    auto const          img = f.zero_based();
    for (std::uint32_t p = 0; p < img.size(); ++p) {
      images_[off + p] = img[p] + off;
    }
  }

  bool ProductElement::coordinate_is_identity(std::size_t i) const {
    std::uint32_t const off = profile_->offset(i);
    for (std::uint32_t p = off; p < off + profile_->degree(i); ++p) {
      if (images_[p] != p) {
        return false;
      }
    }
    return true;
  }

  bool ProductElement::is_identity() const noexcept {
    for (std::uint32_t p = 0; p < images_.size(); ++p) {
      if (images_[p] != p) {
        return false;
      }
    }
    return true;
  }

  std::vector<std::size_t> ProductElement::support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < profile_->size(); ++i) {
      if (!coordinate_is_identity(i)) {
        out.push_back(i);
      }
    }
    return out;
  }

  std::uint64_t ProductElement::hash() const noexcept {
    return detail::hash_u32s(images_);
  }

  ProductElement compose(ProductElement const& a, ProductElement const& b) {
    if (a.profile_ != b.profile_ && !(*a.profile_ == *b.profile_)) {
      throw DegreeMismatch("composing elements of different products");
    }
    ProductElement out(a.profile_);
    for (std::size_t p = 0; p < b.images_.size(); ++p) {
      out.images_[p] = a.images_[b.images_[p]];
    }
    return out;
  }

  ProductElement invert(ProductElement const& a) {
    ProductElement out(a.profile_);
    for (std::uint32_t p = 0; p < a.images_.size(); ++p) {
      out.images_[a.images_[p]] = p;
    }
    return out;
  }

  nlohmann::json to_json(ProductElement const& e, std::string const& profile_label) {
    nlohmann::json coords = nlohmann::json::object();
    for (std::size_t i : e.support()) {
      coords[std::to_string(i)] = to_string(e.coordinate(i));
    }
    return {{"coords", coords}, {"profile", profile_label}};
  }

  ProductElement product_element_from_json(nlohmann::json const& j, ProfilePtr profile) {
    ProductElement e(std::move(profile));
    if (!j.contains("coords") || !j["coords"].is_object()) {
      throw ParseError("product element JSON needs a \"coords\" object");
    }
    for (auto const& [key, value] : j["coords"].items()) {
      if (!value.is_string()) {
        throw ParseError("coordinate " + key + " is not a string");
      }
      e.set_coordinate(parse_count(key, "coordinate"), parse_fin_perm(value.get<std::string>()));
    }
    return e;
  }

  void validate_box(ProductBox const& box, DegreeProfile const& profile) {
    for (auto const& [i, f] : box) {
      if (i >= profile.visible_count()) {
        throw IndexOutOfRange("box constrains coordinate " + std::to_string(i)
                              + ", which is not visible");
      }
      if (f.degree() != profile.degree(i)) {
        throw DegreeMismatch("box coordinate " + std::to_string(i) + " needs degree "
                             + std::to_string(profile.degree(i)));
      }
    }
  }

  bool box_member(ProductElement const& e, ProductBox const& box) {
    return std::all_of(box.begin(), box.end(),
                       [&e](auto const& kv) { return e.coordinate(kv.first) == kv.second; });
  }

  Prod1Witness prod1_witness(Word const& w) {
    if (w.empty()) {
      throw InvalidArgument("prod1_witness needs a nontrivial word");
    }
    std::uint32_t const n = w.rank();
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> constraints(n);
    std::set<std::pair<std::uint64_t, std::uint64_t>>                 seen;

    std::vector<Word> gamma{Word::identity(n)};
    // Reading w right to left walks the suffixes of w.
    for (std::size_t i = w.length(); i-- > 0;) {
      Letter const l    = w[i];
      Word const&  from = gamma.back();
      Word const   to   = concat(reduce(std::span<Letter const>(&l, 1), n), from);
      std::uint64_t a   = word_index(from);
      std::uint64_t b   = word_index(to);
      if (l.sign() < 0) {
        std::swap(a, b);
      }
      constraints[l.index()].emplace_back(a, b);
      gamma.push_back(to);
    }

    std::uint64_t m = 1;
    for (Word const& s : gamma) {
      m = std::max(m, word_index(s));
      for (std::uint32_t k = 0; k < 2 * n; ++k) {
        Letter const c = Letter::from_key(k);
        m = std::max(m, word_index(concat(reduce(std::span<Letter const>(&c, 1), n), s)));
      }
    }
    if (m > UINT32_MAX) {
      throw InvalidArgument("word too long for a 32-bit witness degree");
    }

    Prod1Witness out;
    out.degree = static_cast<std::uint32_t>(m);
    for (std::uint32_t k = 0; k < n; ++k) {
      std::sort(constraints[k].begin(), constraints[k].end());
      constraints[k].erase(std::unique(constraints[k].begin(), constraints[k].end()),
                           constraints[k].end());
      SuppPerm const f = complete_box(OpenBox(constraints[k]));
      out.tuple.push_back(f.to_fin_perm(out.degree));
    }
    return out;
  }

  PlantedFamily prod2_family(ProfilePtr const&               profile,
                             std::uint32_t                   n,
                             std::size_t                     bound,
                             std::vector<std::size_t> const& coordinates) {
    if (n == 0 || bound == 0) {
      throw InvalidArgument("prod2_family needs n >= 1 and bound >= 1");
    }
    std::vector<std::size_t> pool(coordinates);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    for (std::size_t c : pool) {
      if (c >= profile->size()) {
        throw IndexOutOfRange("coordinate " + std::to_string(c) + " outside the profile");
      }
    }
    std::vector<bool> used(pool.size(), false);

    PlantedFamily family;
    family.tuple.assign(n, ProductElement(profile));
    for_each_word(n, bound, EnumerationMode::cyclic_classes, [&](Word const& w) {
      if (w.empty()) {
        return true;
      }
      Prod1Witness const witness = prod1_witness(w);
      std::size_t        slot    = pool.size();
      for (std::size_t s = 0; s < pool.size(); ++s) {
        if (!used[s] && profile->degree(pool[s]) >= witness.degree) {
          slot = s;
          break;
        }
      }
      if (slot == pool.size()) {
        throw ProfileExhausted(to_string(w), "needs an unused coordinate of degree >= "
                                                 + std::to_string(witness.degree));
      }
      used[slot]              = true;
      std::size_t const coord = pool[slot];
      for (std::uint32_t k = 0; k < n; ++k) {
        family.tuple[k].set_coordinate(coord, witness.tuple[k].extended(profile->degree(coord)));
      }
      family.plantings.push_back({w, coord});
      return true;
    });
    return family;
  }

  PlantedFamily prod2_family(ProfilePtr const& profile, std::uint32_t n, std::size_t bound) {
    std::vector<std::size_t> all(profile->size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return prod2_family(profile, n, bound, all);
  }

  PerturbResult prod4_perturb(PlantedFamily const& family,
                              Overrides const&     overrides,
                              std::size_t          bound) {
    PerturbResult result{family.tuple, {}};
    std::set<std::size_t> touched;
    for (auto const& [key, f] : overrides) {
      auto const [element, coord] = key;
      if (element >= result.tuple.size()) {
        throw IndexOutOfRange("override for element " + std::to_string(element)
                              + " of a " + std::to_string(result.tuple.size()) + "-tuple");
      }
      result.tuple[element].set_coordinate(coord, f);
      touched.insert(coord);
    }
    result.report.touched.assign(touched.begin(), touched.end());
    for (Planting const& p : family.plantings) {
      if (p.word.length() <= bound && touched.count(p.coordinate) != 0) {
        result.report.affected.push_back(p);
      }
    }
    result.report.guaranteed = result.report.affected.empty();
    return result;
  }

  std::vector<std::vector<std::size_t>> visible_subsets(std::size_t visible) {
    if (visible >= 32) {
      throw InvalidArgument("too many visible coordinates to enumerate subsets");
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k <= visible; ++k) {
      std::vector<std::size_t> pick(k);
      std::iota(pick.begin(), pick.end(), std::size_t{0});
      while (true) {
        out.push_back(pick);
        // next k-combination in lexicographic order
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == visible - k + i - 1) {
          --i;
        }
        if (i == 0) {
          break;
        }
        ++pick[i - 1];
        for (std::size_t t = i; t < k; ++t) {
          pick[t] = pick[t - 1] + 1;
        }
      }
    }
    return out;
  }

  std::uint64_t subgroup_order(DegreeProfile const& profile, std::span<std::size_t const> coords) {
    std::uint64_t order = 1;
    for (std::size_t i : coords) {
      std::uint64_t const f = factorial(profile.degree(i));
      if (order > UINT64_MAX / f) {
        throw InvalidArgument("subgroup order overflows 64 bits");
      }
      order *= f;
    }
    return order;
  }

  std::vector<FinPerm> subgroup_element(DegreeProfile const&         profile,
                                        std::span<std::size_t const> coords,
                                        std::uint64_t                j) {
    std::uint64_t const order = subgroup_order(profile, coords);
    if (j == 0 || j > order) {
      throw IndexOutOfRange("index " + std::to_string(j) + " outside a group of order "
                            + std::to_string(order));
    }
    std::uint64_t        r = j - 1;
    std::vector<FinPerm> out(coords.size());
    for (std::size_t t = coords.size(); t-- > 0;) {
      std::uint32_t const m    = profile.degree(coords[t]);
      std::uint64_t const base = factorial(m);
      out[t]                   = lex_unrank(m, r % base);
      r /= base;
    }
    return out;
  }

  std::uint64_t subgroup_index(DegreeProfile const& profile, ProductBox const& box) {
    std::uint64_t r = 0;
    for (auto const& [i, f] : box) {
      r = r * factorial(profile.degree(i)) + lex_rank(f);
    }
    return r + 1;
  }

  std::size_t DenseFamily::position(std::size_t subset_index, std::uint64_t j) const {
    if (subset_index >= subsets_.size()) {
      throw IndexOutOfRange("subset index " + std::to_string(subset_index));
    }
    std::size_t const count = starts_[subset_index + 1] - starts_[subset_index];
    if (j == 0 || j > count) {
      throw IndexOutOfRange("element index " + std::to_string(j) + " outside G_I of order "
                            + std::to_string(count));
    }
    return starts_[subset_index] + static_cast<std::size_t>(j - 1);
  }

  std::size_t DenseFamily::subset_index(std::span<std::size_t const> coords) const {
    for (std::size_t s = 0; s < subsets_.size(); ++s) {
      if (std::equal(subsets_[s].begin(), subsets_[s].end(), coords.begin(), coords.end())) {
        return s;
      }
    }
    throw IndexOutOfRange("not a subset of the visible coordinates");
  }

  DenseFamily prod_main_family(ProfilePtr const& profile, std::size_t bound, std::uint64_t seed) {
    if (bound == 0) {
      throw InvalidArgument("bound must be at least 1");
    }
    DenseFamily family;
    family.profile_ = profile;
    family.subsets_ = visible_subsets(profile->visible_count());
    family.starts_.push_back(0);
    for (auto const& subset : family.subsets_) {
      std::uint64_t const order = subgroup_order(*profile, subset);
      if (order > max_dense_members || family.starts_.back() + order > max_dense_members) {
        throw InvalidArgument("dense family would exceed "
                              + std::to_string(max_dense_members) + " members");
      }
      family.starts_.push_back(family.starts_.back() + static_cast<std::size_t>(order));
    }
    std::size_t const n = family.starts_.back();

    std::string const first_word = "1";
    if (profile->reserve_count() == 0) {
      throw ProfileExhausted(first_word, "the profile has no reserve coordinates");
    }
    if (mitm_table_size(n, bound) > 5e7) {
      throw InvalidArgument("certifying " + std::to_string(n) + " reserve generators at bound "
                            + std::to_string(bound) + " is too large");
    }

    constexpr std::uint64_t attempts = 8;
    ProductCarrier const    carrier{profile};
    for (std::uint64_t attempt = 0; attempt < attempts; ++attempt) {
      Rng rng = Rng::derive(seed, attempt);
      std::vector<ProductElement> backing(n, ProductElement(profile));
      for (ProductElement& f : backing) {
        for (std::size_t c = profile->visible_count(); c < profile->size(); ++c) {
          f.set_coordinate(c, random_fin_perm(profile->degree(c), rng));
        }
      }
      if (!l_free_check(backing, bound, carrier).free()) {
        continue;
      }
      family.seed_    = attempt;
      family.backing_ = backing;
      family.members_ = std::move(backing);
      for (std::size_t s = 0; s < family.subsets_.size(); ++s) {
        auto const& subset = family.subsets_[s];
        for (std::size_t pos = family.starts_[s]; pos < family.starts_[s + 1]; ++pos) {
          auto const g = subgroup_element(*profile, subset, pos - family.starts_[s] + 1);
          for (std::size_t t = 0; t < subset.size(); ++t) {
            family.members_[pos].set_coordinate(subset[t], g[t]);
          }
        }
      }
      return family;
    }
    throw ProfileExhausted(first_word, "no random reserve fill was " + std::to_string(bound)
                                           + "-free after " + std::to_string(attempts)
                                           + " attempts");
  }

  ProductElement const& dense_witness(DenseFamily const& family, ProductBox const& box) {
    validate_box(box, *family.profile());
    std::vector<std::size_t> coords;
    for (auto const& kv : box) {
      coords.push_back(kv.first);
    }
    return family.member(family.subset_index(coords), subgroup_index(*family.profile(), box));
  }

}  // namespace libredense
