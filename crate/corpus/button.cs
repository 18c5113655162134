namespace Ui
{
    public delegate void ClickHandler(object sender, int x, int y);

    public class Button
    {
        public event ClickHandler Clicked;
        private int clicks;

        public void Press(int x, int y)
        {
            clicks++;
            if (Clicked != null)
            {
                Clicked(this, x, y);
            }
        }

        public int Clicks
        {
            get { return clicks; }
        }
    }
}
