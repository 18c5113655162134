namespace Bank
{
    /// Holds a balance.
    public class Account
    {
        private decimal balance;
        private string owner;

        public Account(string owner) : this(owner, 0) { }

        public Account(string who, decimal opening)
        {
            owner = who;
            balance = opening;
        }

        public decimal Balance
        {
            get { return balance; }
        }

        public bool Withdraw(decimal amount)
        {
            bool ok = amount <= balance;
            balance = ok ? balance - amount : balance;
            return ok;
        }

        public void Transfer(Account to, decimal amount)
        {
            if (Withdraw(amount))
            {
                to.Deposit(amount);
            }
        }

        public void Deposit(decimal amount)
        {
            balance += amount;
        }
    }
}
