#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "specshift/errors.hpp"

namespace specshift {

// Words are plain strings over a single-character alphabet; the level of a
// word is its length.  The centered coordinate window of a level-n word is
// [-m, m] for n = 2m+1 and [1-m, m] for n = 2m, so the refinement map that
// removes one letter alternates sides with the parity of the level:
// odd level -> even level removes the leftmost letter, even -> odd removes
// the rightmost one.
using Word = std::string;

/// One-step refinement parent of a word (level n -> n-1).
inline Word parent_word(const Word& w) {
    if (w.empty()) throw validation_error("parent_word: the empty word has no parent");
    if (w.size() % 2 == 1) return w.substr(1);
    return w.substr(0, w.size() - 1);
}

/// Window offset of the leftmost coordinate of a level-n word.
inline long window_left(long n) {
    const long m = n / 2;
    return (n % 2 == 1) ? -m : 1 - m;
}

/// All admissible words per level up to max_level, with parent/child links
/// and branching flags.  Levels are sorted; ids are indices into a level.
struct LanguageTable {
    std::vector<std::vector<Word>> levels;        // levels[n]: words of length n
    std::vector<std::vector<int>> parent;         // parent[n][i], n >= 1
    std::vector<std::vector<std::vector<int>>> children;  // children[n][i], n < max_level
    std::vector<std::vector<char>> special;       // special[n][i], n < max_level
    int max_level = 0;

    int index_of(int level, const Word& w) const {
        if (level < 0 || level > max_level) return -1;
        const auto& lv = levels[level];
        auto it = std::lower_bound(lv.begin(), lv.end(), w);
        if (it == lv.end() || *it != w) return -1;
        return static_cast<int>(it - lv.begin());
    }

    bool contains(const Word& w) const {
        return w.size() <= static_cast<std::size_t>(max_level) &&
               index_of(static_cast<int>(w.size()), w) >= 0;
    }

    std::size_t count(int level) const { return levels[level].size(); }
};

/// Materializes the language of a subshift up to max_level.  The factor
/// oracle must return the exact factor set for each length; the sets are
/// rejected if they are not closed under both one-letter restrictions or
/// contain a word that does not extend.
inline LanguageTable build_language(const std::function<std::vector<Word>(int)>& factors,
                                    int max_level) {
    if (max_level < 0) throw validation_error("build_language: max_level must be >= 0");
    LanguageTable t;
    t.max_level = max_level;
    t.levels.resize(max_level + 1);
    t.parent.resize(max_level + 1);
    t.children.resize(max_level + 1);
    t.special.resize(max_level + 1);

    t.levels[0] = {Word{}};
    for (int n = 1; n <= max_level; ++n) {
        auto words = factors(n);
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        if (words.empty())
            throw consistency_error("build_language: no admissible words at level " + std::to_string(n));
        for (const auto& w : words)
            if (w.size() != static_cast<std::size_t>(n))
                throw consistency_error("build_language: generator returned a word of the wrong length");
        t.levels[n] = std::move(words);
    }

    for (int n = 1; n <= max_level; ++n) {
        t.parent[n].resize(t.levels[n].size());
        t.children[n - 1].assign(t.levels[n - 1].size(), {});
        for (std::size_t i = 0; i < t.levels[n].size(); ++i) {
            const Word& w = t.levels[n][i];
            // Closure under both one-letter restrictions, not just the parent side.
            const Word left_cut = w.substr(1);
            const Word right_cut = w.substr(0, w.size() - 1);
            if (t.index_of(n - 1, left_cut) < 0 || t.index_of(n - 1, right_cut) < 0)
                throw consistency_error(
                    "build_language: language not closed under one-letter restrictions at level " +
                    std::to_string(n));
            const int pid = t.index_of(n - 1, parent_word(w));
            t.parent[n][i] = pid;
            t.children[n - 1][pid].push_back(static_cast<int>(i));
        }
        t.special[n - 1].resize(t.levels[n - 1].size());
        for (std::size_t j = 0; j < t.levels[n - 1].size(); ++j) {
            if (t.children[n - 1][j].empty())
                throw consistency_error("build_language: a level-" + std::to_string(n - 1) +
                                        " word has no extension; inconsistent language");
            t.special[n - 1][j] = t.children[n - 1][j].size() > 1 ? 1 : 0;
        }
    }
    return t;
}

/// Iterated parent down to the target level.
inline Word project_word(const LanguageTable& table, const Word& w, int target_level) {
    if (!table.contains(w))
        throw validation_error("project_word: word not in the table");
    if (target_level > static_cast<int>(w.size()))
        throw validation_error("project_word: target level above the word's level");
    if (target_level < 0) throw validation_error("project_word: negative level");
    Word cur = w;
    while (static_cast<int>(cur.size()) > target_level) cur = parent_word(cur);
    return cur;
}

/// Words at the given level with more than one refinement preimage.
inline std::vector<Word> special_words(const LanguageTable& table, int level) {
    if (level >= table.max_level)
        throw validation_error("special_words: extensions unknown at the top level");
    if (level < 0) throw validation_error("special_words: negative level");
    std::vector<Word> out;
    for (std::size_t i = 0; i < table.levels[level].size(); ++i)
        if (table.special[level][i]) out.push_back(table.levels[level][i]);
    return out;
}

inline std::vector<std::size_t> complexity_profile(const LanguageTable& table) {
    std::vector<std::size_t> counts(table.max_level + 1);
    for (int n = 0; n <= table.max_level; ++n) counts[n] = table.levels[n].size();
    return counts;
}

struct EntropyProfile {
    std::vector<double> per_level;    // log(#X_n)/n, index 0 unused (0)
    std::vector<double> running_min;  // nonincreasing; final value is the estimate
    double estimate = 0.0;
};

inline EntropyProfile entropy_profile(const std::vector<double>& log_counts) {
    if (log_counts.size() < 2)
        throw validation_error("entropy_profile: need at least one positive level");
    EntropyProfile p;
    p.per_level.assign(log_counts.size(), 0.0);
    p.running_min.assign(log_counts.size(), 0.0);
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < log_counts.size(); ++n) {
        p.per_level[n] = log_counts[n] / static_cast<double>(n);
        running = std::min(running, p.per_level[n]);
        p.running_min[n] = running;
    }
    p.estimate = running;
    return p;
}

inline EntropyProfile entropy_profile(const std::vector<std::size_t>& counts) {
    std::vector<double> logs(counts.size());
    for (std::size_t n = 0; n < counts.size(); ++n) logs[n] = std::log(static_cast<double>(counts[n]));
    return entropy_profile(logs);
}

inline EntropyProfile entropy_profile(const LanguageTable& table) {
    return entropy_profile(complexity_profile(table));
}

/// Result of a sample-based return-word scan.  `stable` means the second
/// half of the scanned range contributed no new return word; the word list
/// is always a lower bound on the true set.
struct ReturnWordScan {
    std::vector<Word> words;
    bool stable = false;
};

/// Distinct right return words to w found in the sample, up to `horizon`
/// characters.  A return word is the gap between consecutive occurrences.
inline ReturnWordScan return_words(const std::string& sample, const Word& w,
                                   std::size_t horizon) {
    if (w.empty()) throw validation_error("return_words: empty word");
    const std::size_t limit = std::min(horizon, sample.size());
    std::size_t first = sample.find(w);
    if (first == std::string::npos || first >= limit)
        throw validation_error("return_words: word does not occur in the sample");
    std::set<Word> seen;
    std::size_t last_new = first;
    std::size_t prev = first;
    std::size_t pos = sample.find(w, first + 1);
    while (pos != std::string::npos && pos + w.size() <= limit) {
        const Word r = sample.substr(prev, pos - prev);
        if (seen.insert(r).second) last_new = pos;
        prev = pos;
        pos = sample.find(w, pos + 1);
    }
    ReturnWordScan scan;
    scan.words.assign(seen.begin(), seen.end());
    scan.stable = !scan.words.empty() && last_new < limit / 2;
    return scan;
}

} // namespace specshift
