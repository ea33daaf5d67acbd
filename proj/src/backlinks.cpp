#include "synthlab/backlinks.hpp"

#include <algorithm>
#include <tuple>

namespace synthlab {

namespace {

bool earlier(const Referrer& a, const Referrer& b) {
    return std::tie(a.created_at, a.created_seq) < std::tie(b.created_at, b.created_seq);
}

}  // namespace

void BacklinkIndex::add(const std::string& entity_id, const Referrer& referrer) {
    auto& list = entries_[entity_id];
    for (const auto& r : list) {
        if (r.id == referrer.id) return;
    }
    list.insert(std::upper_bound(list.begin(), list.end(), referrer, earlier), referrer);
}

void BacklinkIndex::remove(const std::string& entity_id, std::string_view referrer_id) {
    auto it = entries_.find(entity_id);
    if (it == entries_.end()) return;
    auto& list = it->second;
    list.erase(std::remove_if(list.begin(), list.end(), [&](const Referrer& r) { return r.id == referrer_id; }),
               list.end());
    if (list.empty()) entries_.erase(it);
}

const std::vector<Referrer>& BacklinkIndex::referrers(const std::string& entity_id) const {
    static const std::vector<Referrer> kNone;
    auto it = entries_.find(entity_id);
    return it == entries_.end() ? kNone : it->second;
}

}  // namespace synthlab
