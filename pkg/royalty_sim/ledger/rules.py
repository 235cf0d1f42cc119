"""The mechanism's legal moves as pure state transitions.

Every function takes the current ``TokenState`` and returns the next one, or
raises a ``MechanismError`` subclass leaving the input untouched. Rule 1 is
the new owner's first move (disclose or decline), Rule 2 the take-back right
of H members, Rule 3 the auto-sale that follows a disclosure.
"""
from decimal import Decimal
from typing import Dict, Optional

from royalty_sim.errors import (
    AlreadyDisclosedError,
    FirstMovePendingError,
    InsufficientFundsError,
    InvalidAmountError,
    NoListingError,
    NotEntitledError,
    NotOwnerError,
    PriceMismatchError,
    SelfTransferError,
    TurnExpiredError,
    UnknownAddressError,
)
from royalty_sim.functions import fee_eval, price_eval
from royalty_sim.ledger.state import Address, Listing, MechanismParams, TenureFee, TokenState
from royalty_sim.money import ZERO, to_money


def _player(params: MechanismParams, address: Address) -> str:
    player = params.player_of(address)
    if player is None:
        raise UnknownAddressError(f"address {address} is not controlled by any player")
    return player


def _moved(balances: Dict[str, Decimal], deltas: Dict[str, Decimal]) -> Dict[str, Decimal]:
    updated = dict(balances)
    for player, delta in deltas.items():
        updated[player] = updated.get(player, ZERO) + delta
    return updated


def _settle_escrow(state: TokenState) -> Decimal:
    return state.creator_account + state.escrow


def apply_transfer(
    state: TokenState,
    params: MechanismParams,
    from_address: Address,
    to_address: Address,
    cost: Decimal,
    now: int,
) -> TokenState:
    """Move the token to ``to_address``; the receiver pays ``cost`` side-band."""
    if from_address != state.owner:
        raise NotOwnerError(f"{from_address} does not own the token (owner is {state.owner})")
    if to_address == from_address:
        raise SelfTransferError("a transfer must change the owning address")
    cost = to_money(cost)
    if cost < 0:
        raise InvalidAmountError("transfer cost must be non-negative")
    seller = _player(params, from_address)
    buyer = _player(params, to_address)
    if buyer != seller and state.balance_of(buyer) < cost:
        raise InsufficientFundsError(f"player {buyer} cannot pay {cost}")

    balances = state.balances
    if buyer != seller:
        balances = dict(balances)
        balances[buyer] = balances.get(buyer, ZERO) - cost
        balances[seller] = balances.get(seller, ZERO) + cost

    return state.model_copy(
        update={
            "owner": to_address,
            "history_set": (state.history_set | {from_address}) - {to_address},
            "tenure_fee": None,
            "listing": None,
            # a pending auto-sale escrow becomes final once the owner moves on
            "creator_account": _settle_escrow(state),
            "first_move_deadline": now + params.d_turn,
            "balances": balances,
        }
    )


def apply_disclose(state: TokenState, params: MechanismParams, x: float, now: int) -> TokenState:
    """Rule 1: disclose ``x``, escrow phi(x), clear H and open the auto-sale listing."""
    if state.tenure_fee is not None:
        raise AlreadyDisclosedError("the owner already disclosed this tenure")
    if state.first_move_deadline is None or now > state.first_move_deadline:
        raise TurnExpiredError("the owner's first-move turn has expired")
    fee = fee_eval(params.fee, x)
    price = price_eval(params.price, x)
    payer = _player(params, state.owner)
    if state.balance_of(payer) < fee:
        raise InsufficientFundsError(f"player {payer} cannot pay fee {fee}")

    return state.model_copy(
        update={
            "history_set": frozenset(),
            "tenure_fee": TenureFee(x=float(x), fee=fee, escrowed=fee),
            "listing": Listing(price=price, expires_at=now + params.w_window),
            "first_move_deadline": None,
            "balances": _moved(state.balances, {payer: -fee}),
        }
    )


def apply_decline(state: TokenState, now: int) -> TokenState:
    """Rule 1: elect not to disclose. H is untouched and stays exposed to take-backs."""
    if state.tenure_fee is not None:
        raise AlreadyDisclosedError("the owner already disclosed this tenure")
    return state.model_copy(update={"first_move_deadline": None})


def apply_turn_expiry(state: TokenState, now: int) -> TokenState:
    if state.first_move_deadline is None or now <= state.first_move_deadline:
        raise TurnExpiredError("no first-move turn has lapsed")
    return state.model_copy(update={"first_move_deadline": None})


def apply_take_back(
    state: TokenState, params: MechanismParams, claimant: Address, now: int
) -> TokenState:
    """Rule 2: an H member reclaims the token free of charge."""
    if claimant not in state.history_set or state.tenure_fee is not None:
        raise NotEntitledError(f"{claimant} holds no take-back right")
    if state.turn_open:
        raise FirstMovePendingError("the owner has not yet made their first move")
    _player(params, claimant)

    return state.model_copy(
        update={
            "owner": claimant,
            "history_set": (state.history_set | {state.owner}) - {claimant},
            "first_move_deadline": now + params.d_turn,
        }
    )


def apply_auto_buy(
    state: TokenState, params: MechanismParams, buyer: Address, payment: Decimal, now: int
) -> TokenState:
    """Rule 3: buy at the listed price; the seller is paid and reimbursed their fee."""
    if not state.listing_active(now):
        raise NoListingError("no active auto-sale listing")
    payment = to_money(payment)
    if payment != state.listing.price:
        raise PriceMismatchError(
            f"payment {payment} differs from listed price {state.listing.price}"
        )
    if buyer == state.owner:
        raise SelfTransferError("the owner cannot auto-buy their own listing")
    buyer_player = _player(params, buyer)
    seller_player = _player(params, state.owner)
    if state.balance_of(buyer_player) < payment:
        raise InsufficientFundsError(f"player {buyer_player} cannot pay {payment}")

    balances = dict(state.balances)
    balances[buyer_player] = balances.get(buyer_player, ZERO) - payment
    balances[seller_player] = balances.get(seller_player, ZERO) + payment + state.escrow
    return state.model_copy(
        update={
            "owner": buyer,
            # the seller paid this tenure, so H restarts at them
            "history_set": frozenset({state.owner}),
            "tenure_fee": None,
            "listing": None,
            "first_move_deadline": now + params.d_turn,
            "balances": balances,
        }
    )


def apply_expiry(state: TokenState, now: int) -> Optional[TokenState]:
    """Rule 3: close a lapsed listing and pay the escrowed fee to the creator.

    Returns ``None`` when there is nothing to expire.
    """
    if state.listing is None or now < state.listing.expires_at:
        return None
    return state.model_copy(
        update={
            "listing": None,
            "creator_account": _settle_escrow(state),
            "tenure_fee": state.tenure_fee.model_copy(update={"escrowed": ZERO}),
        }
    )
