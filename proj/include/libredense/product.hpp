#pragma once

// Finite truncations of the product groups prod_i S_phi(i), and the
// constructions that plant free families in them.
//
// A DegreeProfile lists phi(0..N-1); its last reserve_count coordinates are
// the reserve, which boxes never constrain. Elements are stored densely as a
// single block-diagonal permutation of the sum of the degrees, so composing
// two elements is one pass over an array.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "libredense/freeword.hpp"
#include "libredense/oracle.hpp"
#include "libredense/perm.hpp"

namespace libredense {

  class DegreeProfile {
   public:
    // Throws InvalidArgument on an empty profile, a zero degree, or a
    // reserve larger than the profile.
    DegreeProfile(std::vector<std::uint32_t> degrees, std::size_t reserve_count);

    std::size_t size() const noexcept {
      return degrees_.size();
    }

    std::uint32_t degree(std::size_t i) const {
      return degrees_.at(i);
    }

    std::span<std::uint32_t const> degrees() const noexcept {
      return degrees_;
    }

    std::size_t reserve_count() const noexcept {
      return reserve_;
    }

    std::size_t visible_count() const noexcept {
      return degrees_.size() - reserve_;
    }

    bool is_reserve(std::size_t i) const noexcept {
      return i >= visible_count();
    }

    // First global point (0-based) of coordinate i.
    std::uint32_t offset(std::size_t i) const {
      return offsets_.at(i);
    }

    std::uint32_t total_points() const noexcept {
      return offsets_.back();
    }

    // |{i : phi(i) >= l}|
    std::size_t shadow(std::uint32_t l) const noexcept;

    friend bool operator==(DegreeProfile const& a, DegreeProfile const& b) {
      return a.degrees_ == b.degrees_ && a.reserve_ == b.reserve_;
    }

   private:
    std::vector<std::uint32_t> degrees_;
    std::size_t                reserve_ = 0;
    std::vector<std::uint32_t> offsets_;  // size() + 1 entries
  };

  using ProfilePtr = std::shared_ptr<DegreeProfile const>;

  ProfilePtr make_profile(std::vector<std::uint32_t> degrees, std::size_t reserve_count = 0);

  // "reserve=<k>" on the first line, then one degree per line. Blank lines
  // and lines starting with '#' are ignored.
  ProfilePtr  parse_profile(std::string_view text);
  ProfilePtr  load_profile(std::string const& path);
  std::string to_text(DegreeProfile const& profile);

  class ProductElement {
   public:
    // identity
    explicit ProductElement(ProfilePtr profile);

    DegreeProfile const& profile() const noexcept {
      return *profile_;
    }

    ProfilePtr const& profile_ptr() const noexcept {
      return profile_;
    }

    FinPerm coordinate(std::size_t i) const;

    // Throws DegreeMismatch unless f has degree phi(i).
    void set_coordinate(std::size_t i, FinPerm const& f);

    bool coordinate_is_identity(std::size_t i) const;

    bool is_identity() const noexcept;

    // Coordinates carrying a non-identity permutation, in increasing order.
    std::vector<std::size_t> support() const;

    std::uint64_t hash() const noexcept;

    friend bool operator==(ProductElement const& a, ProductElement const& b) {
      return a.images_ == b.images_ && *a.profile_ == *b.profile_;
    }

   private:
    friend ProductElement compose(ProductElement const&, ProductElement const&);
    friend ProductElement invert(ProductElement const&);

    ProfilePtr                 profile_;
    std::vector<std::uint32_t> images_;  // global 0-based points
  };

  // Throws DegreeMismatch when the profiles differ.
  ProductElement compose(ProductElement const& a, ProductElement const& b);
  ProductElement invert(ProductElement const& a);

  // {"coords": {"i": "one-line images"}, "profile": label}; identity
  // coordinates are omitted.
  nlohmann::json to_json(ProductElement const& e, std::string const& profile_label);

  // Inverse of to_json against a known profile.
  ProductElement product_element_from_json(nlohmann::json const& j, ProfilePtr profile);

  struct ProductCarrier {
    using element_type = ProductElement;

    ProfilePtr profile;

    ProductElement identity() const {
      return ProductElement(profile);
    }
    ProductElement compose(ProductElement const& a, ProductElement const& b) const {
      return libredense::compose(a, b);
    }
    ProductElement invert(ProductElement const& a) const {
      return libredense::invert(a);
    }
    bool equal(ProductElement const& a, ProductElement const& b) const {
      return a == b;
    }
    std::uint64_t hash(ProductElement const& a) const {
      return a.hash();
    }
  };

  // Required permutations on finitely many visible coordinates.
  using ProductBox = std::map<std::size_t, FinPerm>;

  // Throws IndexOutOfRange for reserve or missing coordinates and
  // DegreeMismatch for wrong degrees.
  void validate_box(ProductBox const& box, DegreeProfile const& profile);

  bool box_member(ProductElement const& e, ProductBox const& box);

  struct Prod1Witness {
    std::uint32_t        degree = 1;  // m
    std::vector<FinPerm> tuple;       // one per generator of w's rank
  };

  // Permutations of {1..m} on which w does not vanish, obtained by
  // truncating the regular action of the free group on its own words
  // (point k is the k-th word in enumeration order, the empty word is 1).
  // Throws InvalidArgument on the empty word.
  Prod1Witness prod1_witness(Word const& w);

  struct Planting {
    Word        word;
    std::size_t coordinate = 0;
  };

  struct PlantedFamily {
    std::vector<ProductElement> tuple;
    std::vector<Planting>       plantings;  // in enumeration order of words
  };

  // Plants prod1_witness(w) for every cyclic class word w of rank n and
  // length <= bound, each at the smallest unused coordinate among
  // `coordinates` whose degree is large enough. Other coordinates stay
  // identity. Throws ProfileExhausted naming the first word without a home.
  PlantedFamily prod2_family(ProfilePtr const&          profile,
                             std::uint32_t              n,
                             std::size_t                bound,
                             std::vector<std::size_t> const& coordinates);

  // Same, over every coordinate of the profile.
  PlantedFamily prod2_family(ProfilePtr const& profile, std::uint32_t n, std::size_t bound);

  struct StabilityReport {
    std::vector<std::size_t> touched;         // coordinates overridden
    std::vector<Planting>    affected;        // plantings of length <= bound on them
    bool                     guaranteed = true;  // affected is empty
  };

  struct PerturbResult {
    std::vector<ProductElement> tuple;
    StabilityReport             report;
  };

  // Keys are (element index, coordinate). Throws DegreeMismatch or
  // IndexOutOfRange on a bad override.
  using Overrides = std::map<std::pair<std::size_t, std::size_t>, FinPerm>;

  PerturbResult prod4_perturb(PlantedFamily const& family,
                              Overrides const&     overrides,
                              std::size_t          bound);

  // Subsets of {0..visible-1} ordered by size, then lexicographically.
  std::vector<std::vector<std::size_t>> visible_subsets(std::size_t visible);

  // |G_I| = product of phi(i)! over I.
  std::uint64_t subgroup_order(DegreeProfile const& profile, std::span<std::size_t const> coords);

  // The j-th element (1-based) of G_I: mixed radix, the first coordinate of I
  // most significant, each S_m in lexicographic one-line order.
  std::vector<FinPerm> subgroup_element(DegreeProfile const&         profile,
                                        std::span<std::size_t const> coords,
                                        std::uint64_t                j);

  // Inverse of subgroup_element.
  std::uint64_t subgroup_index(DegreeProfile const& profile, ProductBox const& box);

  class DenseFamily {
   public:
    ProfilePtr const& profile() const noexcept {
      return profile_;
    }

    std::size_t size() const noexcept {
      return members_.size();
    }

    std::span<ProductElement const> members() const noexcept {
      return members_;
    }

    // Backing free family, supported on the reserve.
    std::span<ProductElement const> backing() const noexcept {
      return backing_;
    }

    std::vector<std::vector<std::size_t>> const& subsets() const noexcept {
      return subsets_;
    }

    // Which derived seed (0-based attempt) produced the backing family.
    std::uint64_t backing_attempt() const noexcept {
      return seed_;
    }

    // Flat position of h_(I, j); I given by its index in subsets().
    std::size_t position(std::size_t subset_index, std::uint64_t j) const;

    ProductElement const& member(std::size_t subset_index, std::uint64_t j) const {
      return members_.at(position(subset_index, j));
    }

    std::size_t subset_index(std::span<std::size_t const> coords) const;

   private:
    friend DenseFamily prod_main_family(ProfilePtr const&, std::size_t, std::uint64_t);

    ProfilePtr                            profile_;
    std::vector<std::vector<std::size_t>> subsets_;
    std::vector<std::size_t>              starts_;
    std::vector<ProductElement>           members_;
    std::vector<ProductElement>           backing_;
    std::uint64_t                         seed_ = 0;
  };

  // Builds h_(I,j) for every subset I of the visible coordinates and every
  // j <= |G_I|. The backing family on the reserve is a seeded random fill
  // certified L-free by l_free_check over the whole family; a handful of
  // derived seeds are tried before giving up. Throws ProfileExhausted when
  // no reserve exists or certification keeps failing, and InvalidArgument
  // if the family would exceed max_members.
  DenseFamily prod_main_family(ProfilePtr const& profile,
                               std::size_t       bound,
                               std::uint64_t     seed = 0);

  inline constexpr std::size_t max_dense_members = 100000;

  // h_(I,j) with I the box's key set and j its required tuple's index.
  ProductElement const& dense_witness(DenseFamily const& family, ProductBox const& box);

}  // namespace libredense
