//! Published reference values the fixture project reproduces.

use prepwb_core::analysis::{FramePair, RealizationTuple};

/// Instance file for "by" over the by_sample corpus.
pub const BY_INSTANCE_FILE: &str = "Frame\tFrameElement\tLexicalUnit\tSubcorpus\tIdentifier-Position
Achieving_first\tNo instances\toriginate.v\tV-570-s20-np-ppby\t
Arrest\tAuthorities\tarrest.v\tV-730-s20-ppby\t875350-43
Arrest\tAuthorities\tarrest.v\tV-730-s20-ppby\t875353-71
Arrest\tAuthorities\tarrest.v\tV-730-s20-ppby\t875362-160
Arrest\tNo instances\tapprehend.v\tV-730-s20-ppby\t
";

/// Pairs tagged with "2 (1a)" of "through".
pub const PAIRS_2_1A: &str = "Cause_harm:Body_part; Impact:Impactee; Natural_features:Relative_location; Use_firearm:Path";

/// Pairs tagged with "3 (1b)" of "through".
pub const PAIRS_3_1B: &str =
    "Emotion_heat:Location; Path_shape:Area; Ride_Vehicle:Path; Roadways:Path; Self_motion:Self_mover; Travel:Path";

/// Pairs tagged with "1 (1)" of "through", in published order.
pub const PAIRS_1: &str = "Arriving:Path; Cause_motion:Path; Cotheme:Path; Departing:Path; Escaping:Location; \
Escaping:Path; Evading:Path; Fluidic_motion:Path; Mass_motion:Path; Motion:Path; Motion_directional:Path; \
Motion_noise:Path; Operate_vehicle:Path; Path_shape:Path; Placing:Goal; Placing:Path; Removing:Path; \
Roadways:Area; Self_motion:Area; Self_motion:Path; Breathing:Path";

/// Lexical units per pair for "3 (1b)".
pub const UNITS_3_1B: [(&str, &str); 6] = [
    ("Emotion_heat:Location", "boil.v burn.v seethe.v"),
    ("Path_shape:Area", "crisscross.v"),
    ("Ride_Vehicle:Path", "hitchhike.v"),
    (
        "Roadways:Path",
        "bypass.n highway.n line.n motorway.n path.n pathway.n road.n street.n track.n trail.n",
    ),
    ("Self_motion:Self_mover", "sprint.v"),
    ("Travel:Path", "journey.n journey.v tour.n travel.v"),
];

const ARRIVING_TUPLES: &str = "\
Arriving	Mode_of_transportation	arrive.v	Comp	PP	by
Arriving	Mode_of_transportation	arrive.v	Comp	PP	in
Arriving	Mode_of_transportation	come.v	Comp	PP	by
Arriving	Mode_of_transportation	return.n	Comp	PP	by
Arriving	Path	approach.v	Comp	PP	on
Arriving	Path	approach.v	Comp	PP	through
Arriving	Path	approach.v	Comp	PP	via
Arriving	Path	arrive.v	Comp	PP	through
Arriving	Path	arrive.v	Comp	PP	via
Arriving	Path	come.v	Comp	PP	round
Arriving	Path	come.v	Comp	PP	through
Arriving	Path	come.v	Comp	PP	via
Arriving	Path	come.v	Obj	NP
Arriving	Path	enter.v	Comp	PP	at
Arriving	Path	enter.v	Comp	PP	by
Arriving	Path	enter.v	Comp	PP	through
Arriving	Path	enter.v	Comp	PP	via
Arriving	Path	get.v	Comp	PP	past
Arriving	Path	reach.v	Comp	PP	by
Arriving	Path	reach.v	Comp	PP	through
Arriving	Path	reach.v	Comp	PPing
Arriving	Path	return.n	Comp	PP	towards
Arriving	Path	return.v	Comp	PP	across";

/// The 23 realization tuples of Arriving:Mode_of_transportation and
/// Arriving:Path, sorted.
pub fn arriving_tuples() -> Vec<RealizationTuple> {
    ARRIVING_TUPLES
        .lines()
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            RealizationTuple {
                frame: c[0].into(),
                frame_element: c[1].into(),
                lexical_unit: c[2].into(),
                grammatical_function: c[3].into(),
                phrase_type: Some(c[4].into()),
                preposition: c.get(5).map(|p| p.to_string()),
            }
        })
        .collect()
}

/// Substitutable prepositions the lexicographer listed for "2 (1a)".
pub const SUBST_2_1A: &str = "into; on; over; about; at; across; in; under; against; between; through; around; \
with; behind; off; onto; towards; by; down; outside; along; near; below; beneath; above; of; within; underneath; \
beside; beyond; throughout; close; up; for; from";

/// Substitutable prepositions the lexicographer listed for "3 (1b)".
pub const SUBST_3_1B: &str = "inside; through; under; within; at; beneath; amongst; between; on; behind; among; \
above; around; over; all; close; across; along; down; towards; up; past; via; from; of; alongside; by; with; to";

/// Splits a "; "-joined pair list.
pub fn pairs(list: &str) -> Vec<FramePair> {
    list.split("; ").map(|p| p.parse().expect("pair")).collect()
}
