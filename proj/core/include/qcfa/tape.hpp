#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qcfa {

enum class Track : std::uint8_t { I = 0, II = 1 };

inline constexpr std::string_view kTrackIAlphabet = "0123#$%*";
inline constexpr std::string_view kTrackIIAlphabet = "1$#";
inline constexpr char kLeftEndmarker = '<';
inline constexpr char kRightEndmarker = '>';

// A word over the two-track alphabet. Cells are 1-based; position 0 holds the
// left endmarker and position n+1 the right endmarker.
class TwoTrackString {
 public:
  TwoTrackString(std::string trackI, std::string trackII);

  // Parses the `.2t` format: track I on the first line, track II on the second.
  static TwoTrackString parse(std::string_view text);
  std::string format() const;

  std::int64_t size() const { return static_cast<std::int64_t>(tracks_[0].size()); }
  char at(Track t, std::int64_t pos) const;
  const std::string& track(Track t) const { return tracks_[static_cast<int>(t)]; }

  friend bool operator==(const TwoTrackString& a, const TwoTrackString& b) {
    return a.tracks_[0] == b.tracks_[0] && a.tracks_[1] == b.tracks_[1];
  }

 private:
  std::string tracks_[2];
};

using Tape = std::shared_ptr<const TwoTrackString>;
Tape makeTape(TwoTrackString w);

class Signpost {
 public:
  enum class Kind { LeftEnd, RightEnd, KthRightOf, KthLeftOf, DelimiterOfSegment };

  static Signpost leftEnd();
  static Signpost rightEnd();
  static Signpost kthRightOf(const Signpost& base, char symbol, Track track, int k);
  static Signpost kthLeftOf(const Signpost& base, char symbol, Track track, int k);
  // Segment 0 is delimited by the first '*' on track I; segment j >= 1 by the
  // j-th '%' after it.
  static Signpost delimiterOfSegment(int j);

  Kind kind() const { return kind_; }
  const Signpost* base() const { return base_.get(); }
  char symbol() const { return symbol_; }
  Track track() const { return track_; }
  int k() const { return k_; }
  std::string describe() const;

 private:
  Signpost(Kind kind, std::shared_ptr<const Signpost> base, char symbol, Track track, int k)
      : kind_(kind), base_(std::move(base)), symbol_(symbol), track_(track), k_(k) {}

  Kind kind_;
  std::shared_ptr<const Signpost> base_;
  char symbol_;
  Track track_;
  int k_;
};

struct Located {
  std::int64_t position;
  std::int64_t realSteps;
};

Located locateSignpost(const TwoTrackString& w, const Signpost& s);

enum class Ordinal : std::uint8_t { All, Even };

// Members of one track strictly between two positions whose symbol lies in a
// given set; with Ordinal::Even only the 2nd, 4th, ... such members are kept.
class SubseqView {
 public:
  SubseqView(Tape source, std::int64_t left, std::int64_t right, std::string symbols, Track track,
             Ordinal ordinal = Ordinal::All);

  std::int64_t length() const { return static_cast<std::int64_t>(positions_.size()); }
  std::int64_t position(std::int64_t i) const { return positions_[static_cast<std::size_t>(i)]; }
  char operator[](std::int64_t i) const { return source_->at(track_, position(i)); }
  const std::vector<std::int64_t>& positions() const { return positions_; }

  std::int64_t left() const { return left_; }
  std::int64_t right() const { return right_; }
  Track track() const { return track_; }
  const std::string& symbols() const { return symbols_; }
  const Tape& source() const { return source_; }
  std::string text() const;

 private:
  Tape source_;
  std::int64_t left_;
  std::int64_t right_;
  std::string symbols_;
  Track track_;
  std::vector<std::int64_t> positions_;
};

SubseqView extractSubsequence(const Tape& w, const Signpost& left, const Signpost& right,
                              std::string_view symbols, Track track, Ordinal ordinal = Ordinal::All);

// A stretch of one track between two signposts, exclusive on both sides.
struct Span {
  Signpost left = Signpost::leftEnd();
  Signpost right = Signpost::rightEnd();
  Track track = Track::I;
};

struct ResolvedSpan {
  std::int64_t left;
  std::int64_t right;
  Track track;
  std::int64_t realSteps;
};

ResolvedSpan resolve(const TwoTrackString& w, const Span& s);

// Proof-chain component j (0 = prefix x, 1.. = pi_j) of the track-I layout.
Span chainSegment(int j);
// The whole of one track.
Span wholeTrack(Track t);

// Named views used by the proof checkers. All throw NotFound when the
// delimiting symbol they need is absent.
namespace views {
SubseqView whole(const Tape& w, const ResolvedSpan& s);
SubseqView ones(const Tape& w, const ResolvedSpan& s);
SubseqView core(const Tape& w, const ResolvedSpan& s);
SubseqView m1(const Tape& w, const ResolvedSpan& s);
SubseqView m2(const Tape& w, const ResolvedSpan& s);
SubseqView pr(const Tape& w, const ResolvedSpan& s);
SubseqView inp(const Tape& w, const ResolvedSpan& s);
// pre(w): the {0,1} members of track I left of the first '*'.
SubseqView pre(const Tape& w);
}  // namespace views

std::int64_t findRight(const TwoTrackString& w, Track t, std::int64_t from, std::int64_t limit, char sym);
std::int64_t findLeft(const TwoTrackString& w, Track t, std::int64_t from, std::int64_t limit, char sym);

}  // namespace qcfa
