#include "qcfa/tape.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "qcfa/error.hpp"

namespace qcfa {

namespace {

using SymbolTable = std::array<unsigned char, 256>;

// 0 for symbols of the alphabet, 1 for everything else.
constexpr SymbolTable rejectTable(std::string_view alphabet) {
  SymbolTable t{};
  for (auto& x : t) x = 1;
  for (char c : alphabet) t[static_cast<unsigned char>(c)] = 0;
  return t;
}

constexpr SymbolTable kRejectI = rejectTable(kTrackIAlphabet);
constexpr SymbolTable kRejectII = rejectTable(kTrackIIAlphabet);

void checkAlphabet(const std::string& s, const SymbolTable& reject, int track) {
  unsigned char bad = 0;
  for (char c : s) bad |= reject[static_cast<unsigned char>(c)];
  if (!bad) return;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (reject[static_cast<unsigned char>(s[i])]) throw IllegalSymbol(track, i, s[i]);
  }
}

}  // namespace

TwoTrackString::TwoTrackString(std::string trackI, std::string trackII)
    : tracks_{std::move(trackI), std::move(trackII)} {
  if (tracks_[0].size() != tracks_[1].size()) {
    throw LengthMismatch("track I has " + std::to_string(tracks_[0].size()) + " cells, track II has " +
                         std::to_string(tracks_[1].size()));
  }
  if (tracks_[0].empty()) throw FormatError("a two-track string needs at least one cell");
  checkAlphabet(tracks_[0], kRejectI, 0);
  checkAlphabet(tracks_[1], kRejectII, 1);
}

TwoTrackString TwoTrackString::parse(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  if (lines.size() != 2) {
    throw FormatError("expected exactly two lines, found " + std::to_string(lines.size()));
  }
  return TwoTrackString(lines[0], lines[1]);
}

std::string TwoTrackString::format() const { return tracks_[0] + "\n" + tracks_[1] + "\n"; }

char TwoTrackString::at(Track t, std::int64_t pos) const {
  if (pos <= 0) return kLeftEndmarker;
  if (pos > size()) return kRightEndmarker;
  return tracks_[static_cast<int>(t)][static_cast<std::size_t>(pos - 1)];
}

Tape makeTape(TwoTrackString w) { return std::make_shared<const TwoTrackString>(std::move(w)); }

Signpost Signpost::leftEnd() { return Signpost(Kind::LeftEnd, nullptr, 0, Track::I, 0); }
Signpost Signpost::rightEnd() { return Signpost(Kind::RightEnd, nullptr, 0, Track::I, 0); }

Signpost Signpost::kthRightOf(const Signpost& base, char symbol, Track track, int k) {
  return Signpost(Kind::KthRightOf, std::make_shared<const Signpost>(base), symbol, track, k);
}

Signpost Signpost::kthLeftOf(const Signpost& base, char symbol, Track track, int k) {
  return Signpost(Kind::KthLeftOf, std::make_shared<const Signpost>(base), symbol, track, k);
}

Signpost Signpost::delimiterOfSegment(int j) { return Signpost(Kind::DelimiterOfSegment, nullptr, 0, Track::I, j); }

std::string Signpost::describe() const {
  auto tr = [](Track t) { return t == Track::I ? "I" : "II"; };
  switch (kind_) {
    case Kind::LeftEnd:
      return "LeftEnd";
    case Kind::RightEnd:
      return "RightEnd";
    case Kind::KthRightOf:
      return std::to_string(k_) + "th '" + std::string(1, symbol_) + "' on track " + tr(track_) + " right of " +
             base_->describe();
    case Kind::KthLeftOf:
      return std::to_string(k_) + "th '" + std::string(1, symbol_) + "' on track " + tr(track_) + " left of " +
             base_->describe();
    case Kind::DelimiterOfSegment:
      return "delimiter of segment " + std::to_string(k_);
  }
  return "?";
}

std::int64_t findRight(const TwoTrackString& w, Track t, std::int64_t from, std::int64_t limit, char sym) {
  const std::string& s = w.track(t);
  for (std::int64_t p = from + 1; p < limit && p <= w.size(); ++p) {
    if (s[static_cast<std::size_t>(p - 1)] == sym) return p;
  }
  return -1;
}

std::int64_t findLeft(const TwoTrackString& w, Track t, std::int64_t from, std::int64_t limit, char sym) {
  const std::string& s = w.track(t);
  for (std::int64_t p = from - 1; p > limit && p >= 1; --p) {
    if (s[static_cast<std::size_t>(p - 1)] == sym) return p;
  }
  return -1;
}

Located locateSignpost(const TwoTrackString& w, const Signpost& s) {
  const std::int64_t n = w.size();
  switch (s.kind()) {
    case Signpost::Kind::LeftEnd:
      return {0, 0};
    case Signpost::Kind::RightEnd:
      return {n + 1, n + 1};
    case Signpost::Kind::KthRightOf:
    case Signpost::Kind::KthLeftOf: {
      if (s.k() < 1) throw NotFound("signpost ordinal must be positive: " + s.describe());
      Located base = locateSignpost(w, *s.base());
      std::int64_t p = base.position;
      bool right = s.kind() == Signpost::Kind::KthRightOf;
      for (int i = 0; i < s.k(); ++i) {
        p = right ? findRight(w, s.track(), p, n + 1, s.symbol()) : findLeft(w, s.track(), p, 0, s.symbol());
        if (p < 0) throw NotFound("signpost not found: " + s.describe());
      }
      return {p, base.realSteps + (right ? p - base.position : base.position - p)};
    }
    case Signpost::Kind::DelimiterOfSegment: {
      std::int64_t p = findRight(w, Track::I, 0, n + 1, '*');
      if (p < 0) throw NotFound("signpost not found: " + s.describe());
      for (int i = 0; i < s.k(); ++i) {
        p = findRight(w, Track::I, p, n + 1, '%');
        if (p < 0) throw NotFound("signpost not found: " + s.describe());
      }
      return {p, p};
    }
  }
  throw NotFound("unknown signpost kind");
}

SubseqView::SubseqView(Tape source, std::int64_t left, std::int64_t right, std::string symbols, Track track,
                       Ordinal ordinal)
    : source_(std::move(source)), left_(left), right_(right), symbols_(std::move(symbols)), track_(track) {
  if (left_ > right_) {
    throw InvertedBounds("view bounds inverted: " + std::to_string(left_) + " > " + std::to_string(right_));
  }
  const std::string& s = source_->track(track_);
  std::array<bool, 256> wanted{};
  for (char c : symbols_) wanted[static_cast<unsigned char>(c)] = true;
  std::int64_t ordinalCount = 0;
  std::int64_t hi = std::min(right_, source_->size() + 1);
  for (std::int64_t p = std::max<std::int64_t>(left_ + 1, 1); p < hi; ++p) {
    if (!wanted[static_cast<unsigned char>(s[static_cast<std::size_t>(p - 1)])]) continue;
    ++ordinalCount;
    if (ordinal == Ordinal::Even && ordinalCount % 2 != 0) continue;
    positions_.push_back(p);
  }
}

std::string SubseqView::text() const {
  std::string out;
  out.reserve(positions_.size());
  for (std::int64_t p : positions_) out.push_back(source_->at(track_, p));
  return out;
}

SubseqView extractSubsequence(const Tape& w, const Signpost& left, const Signpost& right, std::string_view symbols,
                              Track track, Ordinal ordinal) {
  std::int64_t l = locateSignpost(*w, left).position;
  std::int64_t r = locateSignpost(*w, right).position;
  return SubseqView(w, l, r, std::string(symbols), track, ordinal);
}

ResolvedSpan resolve(const TwoTrackString& w, const Span& s) {
  Located l = locateSignpost(w, s.left);
  Located r = locateSignpost(w, s.right);
  if (l.position > r.position) throw InvertedBounds("span bounds inverted");
  return {l.position, r.position, s.track, l.realSteps + r.realSteps};
}

Span chainSegment(int j) {
  if (j == 0) return Span{Signpost::leftEnd(), Signpost::delimiterOfSegment(0), Track::I};
  return Span{Signpost::delimiterOfSegment(j - 1), Signpost::delimiterOfSegment(j), Track::I};
}

Span wholeTrack(Track t) { return Span{Signpost::leftEnd(), Signpost::rightEnd(), t}; }

namespace views {

namespace {

std::int64_t require(std::int64_t p, const char* what) {
  if (p < 0) throw NotFound(what);
  return p;
}

}  // namespace

SubseqView whole(const Tape& w, const ResolvedSpan& s) {
  std::string all(s.track == Track::I ? kTrackIAlphabet : kTrackIIAlphabet);
  return SubseqView(w, s.left, s.right, all, s.track);
}

SubseqView ones(const Tape& w, const ResolvedSpan& s) { return SubseqView(w, s.left, s.right, "1", s.track); }

SubseqView core(const Tape& w, const ResolvedSpan& s) {
  std::int64_t h = require(findRight(*w, s.track, s.left, s.right, '#'), "core: no '#' in span");
  return SubseqView(w, s.left, h, "1", s.track);
}

SubseqView m1(const Tape& w, const ResolvedSpan& s) { return SubseqView(w, s.left, s.right, "#", s.track); }

SubseqView m2(const Tape& w, const ResolvedSpan& s) {
  std::int64_t h = require(findLeft(*w, s.track, s.right, s.left, '#'), "m2: no '#' in span");
  return SubseqView(w, h, s.right, "1", s.track);
}

SubseqView pr(const Tape& w, const ResolvedSpan& s) { return ones(w, s); }

SubseqView inp(const Tape& w, const ResolvedSpan& s) {
  std::int64_t d = require(findRight(*w, s.track, s.left, s.right, '$'), "inp: no '$' in span");
  return SubseqView(w, s.left, d, "1", s.track);
}

SubseqView pre(const Tape& w) {
  std::int64_t star = require(findRight(*w, Track::I, 0, w->size() + 1, '*'), "pre: no '*' on track I");
  return SubseqView(w, 0, star, "01", Track::I);
}

}  // namespace views

}  // namespace qcfa
