#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "synthlab/time.hpp"

namespace synthlab {

enum class ReferrerKind { note, document };

/// A note or document that links to (or cites) some entity.
struct Referrer {
    ReferrerKind kind = ReferrerKind::note;
    std::string id;
    Timestamp created_at{};
    std::uint64_t created_seq = 0;

    bool operator==(const Referrer&) const = default;
};

/// Reverse edges from entity ids to the notes and documents referencing them.
/// Each list is kept ordered by (created_at, created_seq) of the referrer.
class BacklinkIndex {
public:
    /// No-op if the referrer is already listed under the entity.
    void add(const std::string& entity_id, const Referrer& referrer);
    void remove(const std::string& entity_id, std::string_view referrer_id);

    const std::vector<Referrer>& referrers(const std::string& entity_id) const;

    const std::map<std::string, std::vector<Referrer>>& entries() const { return entries_; }

    bool operator==(const BacklinkIndex&) const = default;

private:
    std::map<std::string, std::vector<Referrer>> entries_;
};

}  // namespace synthlab
