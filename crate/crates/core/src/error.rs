use thiserror::Error;

/// Every failure the library can report. The variant name doubles as the
/// stable error code printed by the command-line tool.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // lattices
    #[error("lattice has no elements")]
    EmptyLattice,
    #[error("unknown lattice element `{0}`")]
    UnknownElement(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("order is not a partial order: {0}")]
    NotPoset(String),
    #[error("elements `{0}` and `{1}` have no meet or no join")]
    NotLattice(String, String),
    #[error("no greatest relative pseudo-complement for `{0}` => `{1}`")]
    NotResiduated(String, String),

    // categories
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("object `{0}` has no identity morphism")]
    MissingIdentity(String),
    #[error("identity law fails: {0}")]
    IdentityLaw(String),
    #[error("composable pair ({0}, {1}) has no composition entry")]
    CompositionGap(String, String),
    #[error("ill-typed composition entry: {0}")]
    BadComposition(String),
    #[error("composition is not associative on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("unsupported schema kind `{0}`")]
    UnsupportedKind(String),
    #[error("bad schema parameters: {0}")]
    BadParams(String),

    // presheaves and morphisms
    #[error("missing or malformed action: {0}")]
    ActionGap(String),
    #[error("identity morphism `{0}` does not act as the identity")]
    IdentityViolated(String),
    #[error("action does not respect composition {0} = {1} o {2}")]
    CompositionViolated(String, String, String),
    #[error("unknown carrier element `{0}`")]
    UnknownCarrierElement(String),
    #[error("membership missing for {0}")]
    MembershipGap(String),
    #[error("label families differ")]
    LabelMismatch,
    #[error("base categories differ")]
    BaseMismatch,
    #[error("missing or malformed component: {0}")]
    ComponentGap(String),
    #[error("naturality square fails at {0}")]
    NotNatural(String),
    #[error("membership decreases at {0}")]
    MembershipDecreases(String),
    #[error("codomain of the first morphism is not the domain of the second")]
    ObjectMismatch,
    #[error("morphism is not a monomorphism")]
    NotMono,
    #[error("subobject is not regular")]
    NotRegular,
    #[error("subset is not closed under the action: {0}")]
    NotClosed(String),

    // limits and oracles
    #[error("induced action is not well defined: {0}")]
    ActionNotWellDefined(String),
    #[error("cone or cocone does not commute: {0}")]
    NotCommutative(String),
    #[error("enumeration cap of {0} candidates exceeded")]
    EnumerationCap(u64),

    // exponentials and slices
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("anchor mismatch: {0}")]
    AnchorMismatch(String),

    // adhesive, topology, rewriting
    #[error("unsupported schema for this construction: {0}")]
    UnsupportedSchema(String),
    #[error("topology axiom violated: {0}")]
    AxiomViolated(String),
    #[error("invalid morphism `{0}`: {1}")]
    InvalidMorphism(String, String),
    #[error("bottom face is not a pushout: {0}")]
    BottomNotPushout(String),
    #[error("back face is not a pullback: {0}")]
    BackFaceNotPullback(String),
    #[error("front face is not a pullback: {0}")]
    FrontFaceNotPullback(String),
    #[error("mediating morphism is not unique: {0}")]
    MediatorNotUnique(String),
    #[error("no match: {0}")]
    NoMatch(String),

    // exchange files
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl Error {
    /// Stable error code, the variant name.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            EmptyLattice => "EmptyLattice",
            UnknownElement(_) => "UnknownElement",
            Duplicate(_) => "Duplicate",
            NotPoset(_) => "NotPoset",
            NotLattice(..) => "NotLattice",
            NotResiduated(..) => "NotResiduated",
            UnknownObject(_) => "UnknownObject",
            UnknownMorphism(_) => "UnknownMorphism",
            MissingIdentity(_) => "MissingIdentity",
            IdentityLaw(_) => "IdentityLaw",
            CompositionGap(..) => "CompositionGap",
            BadComposition(_) => "BadComposition",
            NotAssociative(..) => "NotAssociative",
            UnsupportedKind(_) => "UnsupportedKind",
            BadParams(_) => "BadParams",
            ActionGap(_) => "ActionGap",
            IdentityViolated(_) => "IdentityViolated",
            CompositionViolated(..) => "CompositionViolated",
            UnknownCarrierElement(_) => "UnknownCarrierElement",
            MembershipGap(_) => "MembershipGap",
            LabelMismatch => "LabelMismatch",
            BaseMismatch => "BaseMismatch",
            ComponentGap(_) => "ComponentGap",
            NotNatural(_) => "NotNatural",
            MembershipDecreases(_) => "MembershipDecreases",
            ObjectMismatch => "ObjectMismatch",
            NotMono => "NotMono",
            NotRegular => "NotRegular",
            NotClosed(_) => "NotClosed",
            ActionNotWellDefined(_) => "ActionNotWellDefined",
            NotCommutative(_) => "NotCommutative",
            EnumerationCap(_) => "EnumerationCap",
            ShapeMismatch(_) => "ShapeMismatch",
            AnchorMismatch(_) => "AnchorMismatch",
            UnsupportedSchema(_) => "UnsupportedSchema",
            AxiomViolated(_) => "AxiomViolated",
            InvalidMorphism(..) => "InvalidMorphism",
            BottomNotPushout(_) => "BottomNotPushout",
            BackFaceNotPullback(_) => "BackFaceNotPullback",
            FrontFaceNotPullback(_) => "FrontFaceNotPullback",
            MediatorNotUnique(_) => "MediatorNotUnique",
            NoMatch(_) => "NoMatch",
            ParseError(_) => "ParseError",
            UnresolvedRef(_) => "UnresolvedRef",
            Io(_) => "Io",
            Internal(_) => "Internal",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
