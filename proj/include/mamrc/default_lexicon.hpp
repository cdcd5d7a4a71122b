// Copyright 2026 The mamrc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in copy of data/clues.tsv (kept byte-identical; see lexicon test).

#ifndef MAMRC_DEFAULT_LEXICON_HPP_
#define MAMRC_DEFAULT_LEXICON_HPP_

#include <string_view>

namespace mamrc {

inline constexpr std::string_view kDefaultLexiconTsv = R"TSV(# Clue-word lexicon: surface<TAB>type, one entry per line.
# Types: cardinal, ordinal, comp_super, alternative, other_semantics, stop.
# Surfaces are lowercase and may span several tokens. The longest matching
# surface wins; a `stop` match suppresses every clue over its tokens.
# Besides this table, the detector applies built-in rules for one- and
# two-digit numerals (cardinal), suffixed numerals such as 3rd (ordinal) and
# -er/-est words (comp_super).
# "and" is not a clue by default; add `and<TAB>other_semantics` to enable it.

# cardinals
zero	cardinal
one	cardinal
two	cardinal
three	cardinal
four	cardinal
five	cardinal
six	cardinal
seven	cardinal
eight	cardinal
nine	cardinal
ten	cardinal
eleven	cardinal
twelve	cardinal
thirteen	cardinal
fourteen	cardinal
fifteen	cardinal
sixteen	cardinal
seventeen	cardinal
eighteen	cardinal
nineteen	cardinal
twenty	cardinal
thirty	cardinal
forty	cardinal
fifty	cardinal
sixty	cardinal
seventy	cardinal
eighty	cardinal
ninety	cardinal

# ordinals
first	ordinal
second	ordinal
third	ordinal
fourth	ordinal
fifth	ordinal
sixth	ordinal
seventh	ordinal
eighth	ordinal
ninth	ordinal
tenth	ordinal
eleventh	ordinal
twelfth	ordinal
thirteenth	ordinal
fourteenth	ordinal
fifteenth	ordinal
sixteenth	ordinal
seventeenth	ordinal
eighteenth	ordinal
nineteenth	ordinal
twentieth	ordinal

# irregular comparatives and superlatives
more	comp_super
most	comp_super
less	comp_super
least	comp_super
better	comp_super
best	comp_super
worse	comp_super
worst	comp_super
fewer	comp_super
fewest	comp_super
further	comp_super
furthest	comp_super
farther	comp_super
farthest	comp_super
elder	comp_super
eldest	comp_super
larger	comp_super
largest	comp_super
bigger	comp_super
biggest	comp_super
higher	comp_super
highest	comp_super
longer	comp_super
longest	comp_super

# alternative questions
or	alternative

# other lexical semantics
only	other_semantics
last	other_semantics
single	other_semantics
top	other_semantics
name of the person	other_semantics
trio	other_semantics
duo	other_semantics
pair	other_semantics
couple	other_semantics
both	other_semantics
sole	other_semantics

# interrogative quantity and naming patterns
how many	stop
how much	stop
first name	stop
first names	stop
last name	stop
last names	stop

# common -er/-est words that are not comparatives or superlatives
after	stop
answer	stop
border	stop
brother	stop
center	stop
character	stop
chapter	stop
computer	stop
corner	stop
cover	stop
daughter	stop
driver	stop
either	stop
enter	stop
ever	stop
father	stop
finger	stop
flower	stop
former	stop
founder	stop
leader	stop
letter	stop
manager	stop
master	stop
matter	stop
member	stop
minister	stop
monster	stop
mother	stop
neither	stop
never	stop
number	stop
offer	stop
officer	stop
order	stop
other	stop
over	stop
owner	stop
paper	stop
partner	stop
passenger	stop
player	stop
power	stop
premier	stop
quarter	stop
quarterback	stop
rather	stop
receiver	stop
register	stop
remember	stop
river	stop
scorer	stop
singer	stop
sister	stop
soccer	stop
soldier	stop
speaker	stop
summer	stop
super	stop
teacher	stop
tower	stop
under	stop
water	stop
whether	stop
winner	stop
winter	stop
wonder	stop
worker	stop
writer	stop
arrest	stop
chest	stop
contest	stop
digest	stop
forest	stop
guest	stop
harvest	stop
honest	stop
interest	stop
invest	stop
modest	stop
protest	stop
quest	stop
request	stop
rest	stop
suggest	stop
test	stop
west	stop
)TSV";

}  // namespace mamrc

#endif  // MAMRC_DEFAULT_LEXICON_HPP_
